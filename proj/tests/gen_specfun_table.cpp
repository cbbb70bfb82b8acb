// Regenerates src/specfun_reference_table.inc from the extended-precision
// oracle. Build target gen_specfun_table; run from the repository root.

#include <cstdio>

#include "oracle_bessel.hpp"
#include "specfun_points.hpp"

int main() {
  const auto pts = bhscat_tests::specfun_table_points();
  std::FILE* out = std::fopen("src/specfun_reference_table.inc", "w");
  if (!out) {
    std::perror("specfun_reference_table.inc");
    return 1;
  }
  std::fprintf(out,
               "// Frozen 768-bit oracle values for the special-function acceptance check.\n"
               "// Entries only; the includer declares the row struct and array.\n"
               "// Regenerate with the gen_specfun_table tool in tests/.\n");
  for (const auto& p : pts) {
    const auto v = p.mac ? bhscat_oracle::macdonald(p.nu, p.z) : bhscat_oracle::hankel1(p.nu, p.z);
    std::fprintf(out, "{%d,%d,%.17g,%.17g,%.17g,%.17g},\n", p.nu, p.mac ? 1 : 0, p.z.real(),
                 p.z.imag(), v.real(), v.imag());
  }
  std::fclose(out);
  std::printf("wrote %zu entries\n", pts.size());
  return 0;
}
