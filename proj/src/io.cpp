#include "bhscat/io.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace bhscat {

using nlohmann::json;

void ensure_dir(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw std::runtime_error("cannot create directory " + path + ": " + ec.message());
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary keeps '\n' endings everywhere
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

void write_le_doubles(std::ofstream& out, const std::vector<double>& v) {
  static_assert(sizeof(double) == 8);
  // Little-endian hosts write directly; this code targets them.
  out.write(reinterpret_cast<const char*>(v.data()), std::streamsize(v.size() * 8));
}

}  // namespace

void write_field(const FieldRealization& f, const std::string& stem) {
  json meta;
  meta["dim"] = f.grid.dim;
  meta["order_m"] = f.order_m;
  meta["seed"] = f.seed;
  meta["ir_cutoff"] = f.ir_cutoff;
  meta["grid"] = {{"origin", {f.grid.origin.x, f.grid.origin.y, f.grid.origin.z}},
                  {"h", f.grid.h},
                  {"n", {f.grid.n[0], f.grid.n[1], f.grid.n[2]}}};
  meta["values_file"] = stem.substr(stem.find_last_of('/') + 1) + ".f64";
  meta["format"] = "float64-le-row-major";
  auto out = open_out(stem + ".json");
  out << meta.dump(2) << "\n";

  auto raw = open_out(stem + ".f64");
  write_le_doubles(raw, f.values);
}

FieldRealization read_field(const std::string& stem) {
  std::ifstream in(stem + ".json");
  if (!in) throw std::runtime_error("cannot open " + stem + ".json");
  json meta = json::parse(in);
  FieldRealization f;
  f.grid.dim = meta["dim"].get<int>();
  f.order_m = meta["order_m"].get<double>();
  f.seed = meta["seed"].get<std::uint64_t>();
  f.ir_cutoff = meta["ir_cutoff"].get<double>();
  f.grid.origin = Point{meta["grid"]["origin"][0], meta["grid"]["origin"][1],
                        meta["grid"]["origin"][2]};
  f.grid.h = meta["grid"]["h"].get<double>();
  f.grid.n = {meta["grid"]["n"][0], meta["grid"]["n"][1], meta["grid"]["n"][2]};

  std::ifstream raw(stem + ".f64", std::ios::binary);
  if (!raw) throw std::runtime_error("cannot open " + stem + ".f64");
  f.values.resize(f.grid.count());
  raw.read(reinterpret_cast<char*>(f.values.data()), std::streamsize(f.values.size() * 8));
  if (std::size_t(raw.gcount()) != f.values.size() * 8)
    throw std::runtime_error("field file truncated: " + stem + ".f64");
  return f;
}

void write_records_csv(const std::vector<SweepRecord>& records, const std::string& path) {
  auto out = open_out(path);
  out << "x0,x1,x2,k,kappa_r,kappa_i,sigma,re_us,im_us,realization,"
         "re_u1,im_u1,re_u2,im_u2,re_b,im_b,has_diag\n";
  for (const auto& r : records) {
    out << format_double(r.x.x) << ',' << format_double(r.x.y) << ',' << format_double(r.x.z)
        << ',' << format_double(r.k) << ',' << format_double(r.wn.kappa_r) << ','
        << format_double(r.wn.kappa_i) << ',' << format_double(r.wn.sigma) << ','
        << format_double(r.us.real()) << ',' << format_double(r.us.imag()) << ','
        << r.realization << ',' << format_double(r.u1.real()) << ',' << format_double(r.u1.imag())
        << ',' << format_double(r.u2.real()) << ',' << format_double(r.u2.imag()) << ','
        << format_double(r.born_residual.real()) << ',' << format_double(r.born_residual.imag())
        << ',' << (r.has_diagnostics ? 1 : 0) << '\n';
  }
}

std::vector<SweepRecord> read_records_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty records file: " + path);
  std::vector<SweepRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::vector<std::string> f;
    while (std::getline(ss, tok, ',')) f.push_back(tok);
    if (f.size() != 17) throw std::runtime_error("malformed record line in " + path);
    SweepRecord r;
    r.x = Point{std::stod(f[0]), std::stod(f[1]), std::stod(f[2])};
    r.k = std::stod(f[3]);
    r.wn = complex_wavenumber(r.k, std::stod(f[6]));
    r.us = cplx(std::stod(f[7]), std::stod(f[8]));
    r.realization = std::stoi(f[9]);
    r.u1 = cplx(std::stod(f[10]), std::stod(f[11]));
    r.u2 = cplx(std::stod(f[12]), std::stod(f[13]));
    r.born_residual = cplx(std::stod(f[14]), std::stod(f[15]));
    r.has_diagnostics = f[16] == "1";
    records.push_back(r);
  }
  return records;
}

void write_strength_csv(const StrengthData& s, const std::string& path) {
  auto out = open_out(path);
  out << "x0,x1,x2,T_hat,stderr,flagged\n";
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    out << format_double(s.points[i].x) << ',' << format_double(s.points[i].y) << ','
        << format_double(s.points[i].z) << ',' << format_double(s.T_hat[i]) << ','
        << format_double(s.stderr_[i]) << ',' << (s.flagged[i] ? 1 : 0) << '\n';
  }
}

StrengthData read_strength_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty strength file: " + path);
  StrengthData s;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::vector<std::string> f;
    while (std::getline(ss, tok, ',')) f.push_back(tok);
    if (f.size() != 6) throw std::runtime_error("malformed strength line in " + path);
    s.points.push_back(Point{std::stod(f[0]), std::stod(f[1]), std::stod(f[2])});
    s.T_hat.push_back(std::stod(f[3]));
    s.stderr_.push_back(std::stod(f[4]));
    s.flagged.push_back(f[5] == "1");
  }
  return s;
}

void write_estimate(const StrengthEstimate& est, const ForwardMap& fmap,
                    const std::string& stem) {
  json meta;
  meta["lambda"] = est.lambda;
  meta["data_residual"] = est.data_residual;
  meta["objective"] = est.objective;
  meta["iterations"] = est.iterations;
  meta["converged"] = est.converged;
  meta["grid_n"] = {fmap.grid_n[0], fmap.grid_n[1], fmap.grid_n[2]};
  auto out = open_out(stem + ".json");
  out << meta.dump(2) << "\n";

  auto csv = open_out(stem + ".csv");
  csv << "z0,z1,z2,mu_hat\n";
  for (Eigen::Index j = 0; j < est.mu_hat.size(); ++j) {
    const Point& p = fmap.col_points[std::size_t(j)];
    csv << format_double(p.x) << ',' << format_double(p.y) << ',' << format_double(p.z) << ','
        << format_double(est.mu_hat[j]) << '\n';
  }
}

void write_born_report_csv(const BornReport& rep, const std::string& path) {
  auto out = open_out(path);
  out << "kappa_r,u1_weighted,u1_reference,u1_ratio,u2_weighted,b_weighted\n";
  for (std::size_t i = 0; i < rep.kappa.size(); ++i) {
    out << format_double(rep.kappa[i]) << ',' << format_double(rep.u1_weighted[i]) << ','
        << format_double(rep.u1_reference[i]) << ',' << format_double(rep.u1_ratio[i]) << ','
        << format_double(rep.u2_weighted[i]) << ',' << format_double(rep.b_weighted[i]) << '\n';
  }
}

void write_manifest(const ExperimentConfig& c, const std::vector<std::string>& artifacts,
                    const std::string& path) {
  const std::string cfg = config_json(c);
  json m;
  m["config"] = json::parse(cfg);
  m["config_hash"] = fnv1a(cfg.data(), cfg.size());
  m["seed"] = c.seed;
  m["version"] = "bhscat 1.0";
  m["artifacts"] = artifacts;
  auto out = open_out(path);
  out << m.dump(2) << "\n";
}

}  // namespace bhscat
