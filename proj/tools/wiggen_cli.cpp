#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "wiggen/emit.hpp"
#include "wiggen/verify.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "Wigner functions and photon statistics of photon-subtracted Gaussian "
      "states"};
  app.require_subcommand(1);

  std::string state = "squeezed_vacuum";
  std::string method = "formal";
  std::string axis = "q";
  std::string format = "csv";
  std::string range = "-4:4:0.05";
  std::string out;
  double mean_n = 1.0, phi = 0.0, purity = 1.0, transmission = 1.0, zeta = 0.2;
  int n = 1, report = wiggen::kDefaultReport;
  bool oracle = false, fast = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--state", state, "input state kind")
        ->check(CLI::IsMember({"vacuum", "thermal", "squeezed_vacuum",
                               "squeezed_thermal", "lossy_squeezed"}));
    sub->add_option("--mean-n", mean_n, "mean photon number of the squeezing");
    sub->add_option("--phi", phi, "squeeze phase");
    sub->add_option("--purity", purity, "thermal purity T");
    sub->add_option("--transmission", transmission,
                    "channel transmission t (lossy_squeezed)");
    sub->add_option("--method", method, "subtraction method")
        ->check(CLI::IsMember(
            {"formal", "heralded", "npnr", "squeezed-fock", "squeezed_fock"}));
    sub->add_option("--subtract,-n", n, "photons subtracted / Fock index");
    sub->add_option("--zeta", zeta, "beam splitter tap share");
    sub->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", out, "output file (default stdout)");
    sub->add_flag("--oracle", oracle, "add Fock-basis reference columns");
  };

  auto* slice = app.add_subcommand(
      "slice", "Wigner functions of the family along one phase-space axis");
  add_common(slice);
  slice->add_option("--axis", axis, "slice axis")
      ->check(CLI::IsMember({"q", "p"}));
  slice->add_option("--range", range, "axis range lo:hi:step");

  auto* grid = app.add_subcommand(
      "grid", "Wigner function of one member on a square grid");
  add_common(grid);
  grid->add_option("--range", range, "grid range lo:hi:step (both axes)");

  auto* stats =
      app.add_subcommand("stats", "photon number distribution and moments");
  add_common(stats);
  stats->add_option("--report", report, "largest photon number reported");

  auto* verify =
      app.add_subcommand("verify", "run the acceptance suite and report");
  verify->add_flag("--fast", fast, "skip the two-mode oracle checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (*verify) return wiggen::verify::verify_main(fast, std::cout);

  try {
    wiggen::RunConfig cfg;
    cfg.state = wiggen::make_spec(wiggen::kind_from_name(state), mean_n, phi,
                                  purity, transmission);
    cfg.method = wiggen::method_from_name(method);
    cfg.n = n;
    cfg.zeta = zeta;
    cfg.axis = axis == "p" ? wiggen::Axis::p : wiggen::Axis::q;
    cfg.range = wiggen::RangeSpec::parse(range);
    cfg.format = format == "json" ? wiggen::OutFormat::json
                                  : wiggen::OutFormat::csv;
    cfg.out = out;
    cfg.oracle = oracle;
    cfg.n_report = report;
    if (*slice)
      wiggen::cmd_slice(cfg);
    else if (*grid)
      wiggen::cmd_grid(cfg);
    else if (*stats)
      wiggen::cmd_stats(cfg);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
