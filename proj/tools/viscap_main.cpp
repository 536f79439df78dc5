#include <CLI11.hpp>

#include <string>

#include "viscap/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "viscap: scattering resonances of 1-D Schrodinger operators by the "
      "complex-absorbing-potential viscosity limit, cross-validated against "
      "Birman-Schwinger determinant continuation"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  const char* names[] = {"sweep", "oracle", "davies", "symbol", "compare"};
  const char* descs[] = {
      "CAP eigenvalue sweep over the epsilon schedule with trajectory tracking",
      "Birman-Schwinger determinant zeros and multiplicities in Omega",
      "Davies-oscillator resolvent norms: weighted boundedness vs "
      "unweighted pseudospectral growth",
      "deformation-symbol scan over phase space",
      "full pipeline: sweep + oracle + count comparison"};
  for (int i = 0; i < 5; ++i) {
    CLI::App* sub = app.add_subcommand(names[i], descs[i]);
    sub->add_option("-c,--config", config_path, "JSON configuration file")
        ->required();
    sub->add_option("-o,--out", out_dir, "output directory for artifacts")
        ->required();
  }

  CLI11_PARSE(app, argc, argv);
  return viscap::run(config_path, out_dir,
                     app.get_subcommands().front()->get_name());
}
