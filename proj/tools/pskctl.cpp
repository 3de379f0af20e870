#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "psk/errors.hpp"
#include "psk/version.hpp"

using pskctl::json;

int main(int argc, char** argv) {
  CLI::App app{"pskctl: Pfaffian moment systems, their lattices, vector Pade and sequence acceleration"};
  app.set_version_flag("--version", psk::kVersion);
  app.fallthrough();
  app.require_subcommand(1);

  std::string config_path, out_path, backend;
  double tol = 0;
  long long seed = 0;
  auto* o_config = app.add_option("--config", config_path, "JSON run config");
  auto* o_out = app.add_option("--out", out_path, "output file (stdout if absent)");
  auto* o_backend = app.add_option("--backend", backend, "exact or float")->check(CLI::IsMember({"exact", "float"}));
  auto* o_tol = app.add_option("--tol", tol, "float tolerance");
  auto* o_seed = app.add_option("--seed", seed, "seed for random instances");

  std::string suite, system, series_path, sequence_path, matrix_path;
  int trials = 0, N = 0, K = 0, nmax = 0, n = 0;
  bool corrupt = false;

  auto* validate = app.add_subcommand("validate", "run an invariant suite");
  auto* o_suite = validate->add_option("--suite", suite, "pfcore | schur | psop | lattice | gipa | accel");
  auto* o_trials = validate->add_option("--trials", trials, "random instances per check");
  auto* o_vsys = validate->add_option("--system", system, "restrict the lattice suite to one system");
  validate->add_flag("--corrupt", corrupt, "inject a corrupted entry (negative control)");

  auto* lattice = app.add_subcommand("lattice", "lattice tables and trajectories");
  lattice->require_subcommand(1);
  auto* lrun = lattice->add_subcommand("run", "tau table or trajectory as CSV");
  auto* o_rsys = lrun->add_option("--system", system, "lattice id")->required();
  auto* lval = lattice->add_subcommand("validate", "bilinear sweep of one lattice");
  auto* o_lsys = lval->add_option("--system", system, "lattice id")->required();
  auto* o_ltrials = lval->add_option("--trials", trials, "random measures");
  lval->add_flag("--corrupt", corrupt, "inject a corrupted tau cell");

  auto* psop = app.add_subcommand("psop", "polynomial coefficients and residuals as JSON");
  auto* o_pn = psop->add_option("--n", n, "highest degree");

  auto* gipa = app.add_subcommand("gipa", "generalized inverse vector Pade approximant");
  auto* o_series = gipa->add_option("--series", series_path, "series JSON {\"d\":..,\"coeffs\":[[..],..]}");
  auto* o_gn = gipa->add_option("--n", N, "numerator degree N");
  auto* o_gk = gipa->add_option("--k", K, "denominator half-degree K");

  auto* accel = app.add_subcommand("accelerate", "Pfaffian sequence transformation");
  auto* o_seq = accel->add_option("--sequence", sequence_path, "CSV with one value per line");
  auto* o_nmax = accel->add_option("--nmax", nmax, "highest transformation level");

  auto* pfc = app.add_subcommand("pfaffian", "Pfaffian and determinant of a skew matrix");
  auto* o_matrix = pfc->add_option("--matrix", matrix_path, "JSON array of rows");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : pskctl::kUsage;
  }

  try {
    json cfg = o_config->count() ? pskctl::load_json_file(config_path) : json::object();
    if (!cfg.is_object()) throw psk::ConfigError("config must be a JSON object");
    if (o_backend->count()) cfg["backend"] = backend;
    if (o_tol->count()) cfg["tol"] = tol;
    if (o_seed->count()) cfg["seed"] = seed;
    if (o_suite->count()) cfg["suite"] = suite;
    if (o_trials->count() || o_ltrials->count()) cfg["trials"] = trials;
    if (o_vsys->count() || o_rsys->count() || o_lsys->count()) cfg["system"] = system;
    if (corrupt) cfg["corrupt"] = true;
    if (o_pn->count()) cfg["n"] = n;
    if (o_gn->count()) cfg["N"] = N;
    if (o_gk->count()) cfg["K"] = K;
    if (o_nmax->count()) cfg["nmax"] = nmax;
    if (o_series->count()) cfg["series"] = pskctl::load_json_file(series_path);
    if (o_seq->count()) cfg["sequence"] = pskctl::load_sequence_csv(sequence_path);
    if (o_matrix->count()) cfg["matrix"] = pskctl::load_json_file(matrix_path);

    pskctl::Outcome res;
    if (validate->parsed()) {
      cfg["command"] = "validate";
      pskctl::check_config(cfg);
      res = pskctl::cmd_validate(cfg);
    } else if (lrun->parsed()) {
      cfg["command"] = "lattice run";
      pskctl::check_config(cfg);
      res = pskctl::cmd_lattice_run(cfg);
    } else if (lval->parsed()) {
      cfg["command"] = "lattice validate";
      pskctl::check_config(cfg);
      res = pskctl::cmd_lattice_validate(cfg);
    } else if (psop->parsed()) {
      cfg["command"] = "psop";
      pskctl::check_config(cfg);
      res = pskctl::cmd_psop(cfg);
    } else if (gipa->parsed()) {
      cfg["command"] = "gipa";
      pskctl::check_config(cfg);
      res = pskctl::cmd_gipa(cfg);
    } else if (accel->parsed()) {
      cfg["command"] = "accelerate";
      pskctl::check_config(cfg);
      res = pskctl::cmd_accelerate(cfg);
    } else {
      cfg["command"] = "pfaffian";
      pskctl::check_config(cfg);
      res = pskctl::cmd_pfaffian(cfg);
    }

    if (o_out->count()) {
      pskctl::write_atomic(out_path, res.text);
      if (!res.meta.empty()) pskctl::write_atomic(out_path + ".meta.json", res.meta);
    } else {
      std::cout << res.text;
    }
    return res.code;
  } catch (const psk::ConfigError& e) {
    std::cerr << "pskctl: config error: " << e.what() << "\n";
    return pskctl::kUsage;
  } catch (const psk::InvalidOrder& e) {
    std::cerr << "pskctl: " << e.what() << "\n";
    return pskctl::kUsage;
  } catch (const psk::InsufficientOrder& e) {
    std::cerr << "pskctl: " << e.what() << "\n";
    return pskctl::kUsage;
  } catch (const psk::InvalidIndexList& e) {
    std::cerr << "pskctl: " << e.what() << "\n";
    return pskctl::kUsage;
  } catch (const json::exception& e) {
    std::cerr << "pskctl: config error: " << e.what() << "\n";
    return pskctl::kUsage;
  } catch (const psk::Error& e) {
    std::cerr << "pskctl: " << e.what() << "\n";
    return pskctl::kResidualFailure;
  }
}
