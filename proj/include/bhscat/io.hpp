#pragma once

#include <string>

#include "bhscat/config.hpp"
#include "bhscat/estimator.hpp"
#include "bhscat/inversion.hpp"

namespace bhscat {

/// All text artifacts use '.' decimals, '\n' line endings, and 17 significant
/// digits so repeated runs are byte-identical.

void write_field(const FieldRealization& f, const std::string& stem);  // stem.json + stem.f64
FieldRealization read_field(const std::string& stem);

void write_records_csv(const std::vector<SweepRecord>& records, const std::string& path);
std::vector<SweepRecord> read_records_csv(const std::string& path);

void write_strength_csv(const StrengthData& s, const std::string& path);
StrengthData read_strength_csv(const std::string& path);

void write_estimate(const StrengthEstimate& est, const ForwardMap& fmap,
                    const std::string& stem);  // stem.json + stem.csv

void write_born_report_csv(const BornReport& rep, const std::string& path);

/// Run manifest: config echo + hash, seeds, artifact list.
void write_manifest(const ExperimentConfig& c, const std::vector<std::string>& artifacts,
                    const std::string& path);

void ensure_dir(const std::string& path);

}  // namespace bhscat
