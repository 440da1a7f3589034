#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "svet/counts.hpp"
#include "svet/hvmodels.hpp"
#include "svet/inequalities.hpp"
#include "svet/sourcesim.hpp"
#include "svet/statistics.hpp"
#include "svet/tomography.hpp"

namespace svet::cli {

namespace fs = std::filesystem;

namespace {

constexpr int kDefaultRestarts = 5;
constexpr int kDefaultAngleRestarts = 20;
constexpr double kDefaultIntensity = 290.0;  // typical Table 1 block total
constexpr int kWeakReplicates = 30;
const double kSvetlichnyQuantumMax = 4 * std::sqrt(2.0);

std::string num(double x, int precision = 6) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(precision) << (x == 0.0 ? 0.0 : x);  // no "-0.000000"
  return s.str();
}

AngleSet input_phases(const RunConfig& cfg) { return cfg.phases ? load_phases(*cfg.phases) : AngleSet::optimal(); }

CountsTable input_counts(const RunConfig& cfg) {
  return load_counts(cfg.counts.value_or(bundled_counts()), input_phases(cfg)).table;
}

MonteCarloOptions mc_options(const RunConfig& cfg) { return {cfg.replicates, cfg.seed, cfg.threads}; }

TomographyOptions tomo_options(const RunConfig& cfg) {
  TomographyOptions t;
  t.restarts = cfg.restarts.value_or(kDefaultRestarts);
  t.seed = cfg.seed;
  if (cfg.max_iterations) t.max_iterations = *cfg.max_iterations;
  return t;
}

DensityMatrix model_state(const RunConfig& cfg) {
  return cfg.v ? noisy_ghz(*cfg.v) : DensityMatrix::pure(ghz_state());
}

std::string basis_label(std::size_t i) {
  std::string s;
  for (int q = 2; q >= 0; --q) s += ((i >> q) & 1) ? 'V' : 'H';
  return s;
}

std::string matrix_csv(const Eigen::MatrixXd& m) {
  std::ostringstream s;
  s << "row";
  for (Eigen::Index c = 0; c < m.cols(); ++c) s << ',' << basis_label(static_cast<std::size_t>(c));
  s << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    s << basis_label(static_cast<std::size_t>(r));
    for (Eigen::Index c = 0; c < m.cols(); ++c) s << ',' << num(m(r, c), 8);
    s << '\n';
  }
  return s.str();
}

// Eight correlations, then |S_v| and Mermin, from one table.
std::vector<double> counts_statistic(const CountsTable& t) {
  std::vector<double> v;
  for (const auto& e : svetlichny_correlations(t)) v.push_back(e.value);
  v.push_back(svetlichny_from_counts(t));
  v.push_back(mermin_from_counts(t));
  return v;
}

std::string correlations_csv(const CountsTable& t, const std::vector<McSummary>& mc) {
  const auto est = svetlichny_correlations(t);
  std::ostringstream s;
  s << "term,value,sigma\n";
  for (std::size_t i = 0; i < est.size(); ++i) {
    s << term_label(kSvetlichnyTerms[i]) << ',' << num(est[i].value) << ',' << num(mc[i].stddev) << '\n';
  }
  return s.str();
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw UsageError("cannot create output directory " + dir.string());
}

}  // namespace

void write_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f << content;
    f.flush();
    if (!f) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

fs::path bundled_counts() {
  const fs::path source = fs::path(SVET_SOURCE_DATA_DIR) / "lavoie_table1.csv";
  if (fs::exists(source)) return source;
  return fs::path(SVET_INSTALLED_DATA_DIR) / "lavoie_table1.csv";
}

void validate(const RunConfig& cfg) {
  if (cfg.seed == 0) throw UsageError("--seed must be positive");
  if (cfg.replicates < 2) throw UsageError("--replicates must be at least 2");
  if (cfg.v && !(*cfg.v >= 0.0 && *cfg.v <= 1.0)) throw UsageError("--v must lie in [0, 1]");
  if (cfg.intensity && !(*cfg.intensity > 0.0 && std::isfinite(*cfg.intensity))) {
    throw UsageError("--intensity must be positive");
  }
  if (cfg.restarts && *cfg.restarts < 1) throw UsageError("--restarts must be positive");
  if (cfg.max_iterations && *cfg.max_iterations < 1) throw UsageError("--max-iterations must be positive");
  for (const auto& p : {cfg.counts, cfg.phases}) {
    if (p && !fs::is_regular_file(*p)) throw UsageError("no such file: " + p->string());
  }
}

int cmd_bounds(const RunConfig& cfg, std::ostream& out) {
  const int restarts = cfg.restarts.value_or(kDefaultAngleRestarts);
  Eigen::VectorXcd bell = Eigen::VectorXcd::Zero(4);
  bell(0) = bell(3) = 1 / std::sqrt(2.0);
  const double chsh_q = maximize_chsh(DensityMatrix::pure(StateVector(bell)), restarts, cfg.seed).value;
  const double svet_q = maximize_svetlichny(DensityMatrix::pure(ghz_state()), restarts, cfg.seed).value;
  const AngleSet mermin_angles(0, kPi / 2, 0, kPi / 2, kPi / 2, 0);
  const double mermin_q = mermin_qm(DensityMatrix::pure(ghz_state()), mermin_angles);

  out << "expression model bound\n";
  out << "CHSH local " << model_bound(Expression::CHSH, Model::Local) << '\n';
  out << "Mermin local " << model_bound(Expression::Mermin, Model::Local) << '\n';
  out << "Svetlichny local " << model_bound(Expression::Svetlichny, Model::Local) << '\n';
  out << "Mermin bipartite " << model_bound(Expression::Mermin, Model::Bipartite) << '\n';
  out << "Svetlichny bipartite " << model_bound(Expression::Svetlichny, Model::Bipartite) << '\n';
  out << "CHSH quantum " << num(chsh_q, 3) << '\n';
  out << "Mermin quantum " << num(mermin_q, 3) << '\n';
  out << "Svetlichny quantum " << num(svet_q, 3) << '\n';
  return kSuccess;
}

int cmd_predict(const RunConfig& cfg, std::ostream& out) {
  const auto ang = input_phases(cfg);
  const auto rho = model_state(cfg);
  const double v = cfg.v.value_or(1.0);
  out << "v=" << num(v) << '\n';
  for (const auto& t : kSvetlichnyTerms) {
    const double e = expectation3(rho, ang.phase(Party::A, t.a_primed), ang.phase(Party::B, t.b_primed),
                                  ang.phase(Party::C, t.c_primed));
    out << term_label(t) << '=' << num(e) << '\n';
  }
  out << "svetlichny=" << num(svetlichny_qm(rho, ang)) << '\n';
  out << "svetlichny_closed_form=" << num(v * svetlichny_prediction(ang)) << '\n';
  out << "mermin=" << num(mermin_qm(rho, ang)) << '\n';
  out << "fidelity_ghz=" << num(fidelity(rho, ghz_state())) << '\n';
  return kSuccess;
}

int cmd_optimize_angles(const RunConfig& cfg, std::ostream& out) {
  const auto r = maximize_svetlichny(model_state(cfg), cfg.restarts.value_or(kDefaultAngleRestarts), cfg.seed);
  static constexpr const char* kNames[] = {"phi_a", "phi_a_prime", "phi_b", "phi_b_prime", "phi_c", "phi_c_prime"};
  const auto phases = r.angles.as_array();
  for (std::size_t i = 0; i < phases.size(); ++i) out << kNames[i] << '=' << num(phases[i]) << '\n';
  out << "svetlichny=" << num(r.value, 10) << '\n';
  if (cfg.out) {
    ensure_dir(*cfg.out);
    std::ostringstream json;
    write_phases(json, r.angles);
    write_atomic(*cfg.out / "phases.json", json.str());
  }
  return kSuccess;
}

int cmd_correlations(const RunConfig& cfg, std::ostream& out) {
  const auto t = input_counts(cfg);
  const auto est = svetlichny_correlations(t);
  const auto mc = monte_carlo(t, counts_statistic, mc_options(cfg));
  out << "term value sigma counts\n";
  for (std::size_t i = 0; i < est.size(); ++i) {
    out << term_label(kSvetlichnyTerms[i]) << ' ' << num(est[i].value) << ' ' << num(mc[i].stddev) << ' '
        << est[i].numerator << '/' << est[i].total << '\n';
  }
  out << "svetlichny " << num(svetlichny_from_counts(t)) << ' ' << num(mc[8].stddev) << '\n';
  out << "mermin " << num(mermin_from_counts(t)) << ' ' << num(mc[9].stddev) << '\n';
  if (cfg.out) {
    ensure_dir(*cfg.out);
    write_atomic(*cfg.out / "correlations.csv", correlations_csv(t, mc));
  }
  return kSuccess;
}

int cmd_tomography(const RunConfig& cfg, std::ostream& out) {
  const auto t = input_counts(cfg);
  const auto r = reconstruct(t, build_projectors(t.phases()), tomo_options(cfg));
  const auto d = derived_quantities(r, t.phases());
  out << "fidelity_ghz=" << num(d.fidelity) << '\n';
  out << "svetlichny_qm=" << num(d.svetlichny) << '\n';
  out << "mermin_qm=" << num(d.mermin) << '\n';
  out << "intensity=" << num(r.intensity) << '\n';
  out << "log_likelihood=" << num(r.log_likelihood) << '\n';
  out << "iterations=" << r.iterations << '\n';
  out << "converged=" << (r.converged ? "true" : "false") << '\n';
  out << "eigenvalues=";
  for (Eigen::Index i = d.eigenvalues.size() - 1; i >= 0; --i) out << num(d.eigenvalues(i)) << (i ? "," : "\n");
  if (cfg.out) {
    ensure_dir(*cfg.out);
    std::ostringstream rho;
    write_density_matrix(rho, r);
    write_atomic(*cfg.out / "rho.txt", rho.str());
    write_atomic(*cfg.out / "rho_real.csv", matrix_csv(d.real_part));
    write_atomic(*cfg.out / "rho_imag.csv", matrix_csv(d.imag_part));
  }
  return r.converged ? kSuccess : kNotConverged;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  const auto phases = input_phases(cfg);
  const auto rho = noisy_ghz(cfg.v.value_or(1.0));
  const auto counts = sample_counts(rho, build_projectors(phases), cfg.intensity.value_or(kDefaultIntensity), cfg.seed);
  std::ostringstream csv;
  write_counts(csv, counts);
  if (!cfg.out) {
    out << csv.str();
    return kSuccess;
  }
  ensure_dir(*cfg.out);
  std::ostringstream json;
  write_phases(json, phases);
  write_atomic(*cfg.out / "counts.csv", csv.str());
  write_atomic(*cfg.out / "phases.json", json.str());
  out << "wrote " << (*cfg.out / "counts.csv").string() << '\n';
  return kSuccess;
}

int cmd_source_sim(const RunConfig&, std::ostream& out) {
  const auto output = run_interferometer(double_pair_state(0.0), interferometer());
  const double phase = compensating_phase(output);
  const auto ps = postselect_ghz(output, phase);
  for (std::size_t i = 0; i < 8; ++i) {
    const Complex a = ps.state.amps()(static_cast<Eigen::Index>(i));
    out << "amplitude_" << basis_label(i) << '=' << num(a.real()) << (a.imag() < 0 ? "" : "+") << num(a.imag())
        << "i\n";
  }
  out << "output_phase=" << num(phase) << '\n';
  out << "postselection_probability=" << num(ps.probability) << '\n';
  out << "fidelity_ghz=" << num(fidelity(DensityMatrix::pure(ps.state), ghz_state()), 10) << '\n';
  return kSuccess;
}

int cmd_report(const RunConfig& cfg, std::ostream& out) {
  const fs::path dir = cfg.out.value_or("report");
  ensure_dir(dir);
  const auto t = input_counts(cfg);
  const auto mc_opts = mc_options(cfg);

  const auto counts_mc = monte_carlo(t, counts_statistic, mc_opts);
  const double sv = svetlichny_from_counts(t);
  const double mermin = mermin_from_counts(t);

  const auto fit = reconstruct(t, build_projectors(t.phases()), tomo_options(cfg));
  const auto d = derived_quantities(fit, t.phases());

  // one restart per replicate keeps 400 reconstructions affordable
  TomographyOptions replicate_tomo = tomo_options(cfg);
  replicate_tomo.restarts = 1;
  const Statistic tomo_stat = [replicate_tomo](const CountsTable& r) {
    const auto q = derived_quantities(reconstruct(r, build_projectors(r.phases()), replicate_tomo), r.phases());
    return std::vector<double>{q.fidelity, q.svetlichny};
  };
  const auto tomo_mc = monte_carlo(t, tomo_stat, mc_opts);

  const bool weak = cfg.replicates < kWeakReplicates;
  const double sv_sigma = counts_mc[8].stddev;

  nlohmann::ordered_json js;
  js["point"] = sv;
  js["sigma"] = sv_sigma;
  js["bound"] = 4;
  js["quantum_max"] = kSvetlichnyQuantumMax;
  js["replicates"] = cfg.replicates;
  js["sigma_weak"] = weak;

  std::ostringstream summary;
  summary << "svetlichny_point=" << num(sv) << '\n'
          << "svetlichny_sigma=" << num(sv_sigma) << '\n'
          << "svetlichny_bound=4\n"
          << "svetlichny_quantum_max=" << num(kSvetlichnyQuantumMax) << '\n'
          << "svetlichny_violation_sigmas=" << num(sv_sigma > 0 ? (sv - 4.0) / sv_sigma : 0.0, 2) << '\n'
          << "mermin_point=" << num(mermin) << '\n'
          << "mermin_sigma=" << num(counts_mc[9].stddev) << '\n'
          << "fidelity_point=" << num(d.fidelity) << '\n'
          << "fidelity_sigma=" << num(tomo_mc[0].stddev) << '\n'
          << "svetlichny_qm_point=" << num(d.svetlichny) << '\n'
          << "svetlichny_qm_sigma=" << num(tomo_mc[1].stddev) << '\n'
          << "mermin_qm_point=" << num(d.mermin) << '\n'
          << "intensity=" << num(fit.intensity) << '\n'
          << "log_likelihood=" << num(fit.log_likelihood) << '\n'
          << "tomography_iterations=" << fit.iterations << '\n'
          << "tomography_converged=" << (fit.converged ? "true" : "false") << '\n'
          << "replicates=" << cfg.replicates << '\n'
          << "seed=" << cfg.seed << '\n'
          << "sigma_weak=" << (weak ? "true" : "false") << '\n';
  if (weak) summary << "warning=fewer than " << kWeakReplicates << " replicates; sigma is statistically weak\n";

  write_atomic(dir / "correlations.csv", correlations_csv(t, counts_mc));
  write_atomic(dir / "svetlichny.json", js.dump(2) + "\n");
  write_atomic(dir / "rho_real.csv", matrix_csv(d.real_part));
  write_atomic(dir / "rho_imag.csv", matrix_csv(d.imag_part));
  write_atomic(dir / "summary.txt", summary.str());

  out << "S_v = " << num(sv, 2) << " +- " << num(sv_sigma, 2) << " (bound 4, quantum max 5.657)\n";
  out << "Mermin = " << num(mermin, 2) << " +- " << num(counts_mc[9].stddev, 2) << '\n';
  out << "fidelity = " << num(d.fidelity, 2) << " +- " << num(tomo_mc[0].stddev, 2) << '\n';
  out << "S_v (reconstructed) = " << num(d.svetlichny, 2) << " +- " << num(tomo_mc[1].stddev, 2) << '\n';
  if (weak) out << "warning: only " << cfg.replicates << " replicates; sigma is statistically weak\n";
  if (!fit.converged) out << "warning: tomography did not converge\n";
  out << "wrote " << dir.string() << '\n';
  return fit.converged ? kSuccess : kNotConverged;
}

int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    validate(cfg);
    if (cfg.command == "bounds") return cmd_bounds(cfg, out);
    if (cfg.command == "predict") return cmd_predict(cfg, out);
    if (cfg.command == "optimize-angles") return cmd_optimize_angles(cfg, out);
    if (cfg.command == "correlations") return cmd_correlations(cfg, out);
    if (cfg.command == "tomography") return cmd_tomography(cfg, out);
    if (cfg.command == "simulate") return cmd_simulate(cfg, out);
    if (cfg.command == "source-sim") return cmd_source_sim(cfg, out);
    if (cfg.command == "report") return cmd_report(cfg, out);
    throw UsageError("unknown command '" + cfg.command + "'");
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
  }
  return kMalformedInput;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Svetlichny inequality toolkit"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string counts, phases, out_dir;
  double v = 0.0, intensity = 0.0;
  int restarts = 0, max_iterations = 0;

  auto* counts_opt = app.add_option("--counts", counts, "Counts CSV (default: bundled Table 1)");
  auto* phases_opt = app.add_option("--phases", phases, "Phases JSON sidecar");
  app.add_option("--seed", cfg.seed, "Seed for all randomness")->capture_default_str();
  app.add_option("--replicates", cfg.replicates, "Monte Carlo replicates")->capture_default_str();
  auto* out_opt = app.add_option("--out", out_dir, "Output directory");
  auto* v_opt = app.add_option("--v", v, "GHZ visibility in [0, 1]");
  auto* intensity_opt = app.add_option("--intensity", intensity, "Counts per analyzer triple");
  auto* restarts_opt = app.add_option("--restarts", restarts, "Optimizer restarts");
  auto* iterations_opt = app.add_option("--max-iterations", max_iterations, "Tomography iteration cap per restart");
  app.add_option("--threads", cfg.threads, "Monte Carlo threads (0: all cores)");

  const std::pair<const char*, const char*> commands[] = {
      {"bounds", "Local and bipartite bounds plus quantum maxima"},
      {"predict", "Quantum predictions at the given phases"},
      {"optimize-angles", "Maximize S_v over analyzer phases"},
      {"correlations", "Correlations, S_v and Mermin from counts"},
      {"tomography", "Maximum-likelihood state reconstruction"},
      {"simulate", "Poisson counts from a noisy GHZ state"},
      {"source-sim", "Double-pair interferometer simulation"},
      {"report", "Full pipeline with output files"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kMalformedInput;
  }

  cfg.command = app.get_subcommands().front()->get_name();
  if (*counts_opt) cfg.counts = counts;
  if (*phases_opt) cfg.phases = phases;
  if (*out_opt) cfg.out = out_dir;
  if (*v_opt) cfg.v = v;
  if (*intensity_opt) cfg.intensity = intensity;
  if (*restarts_opt) cfg.restarts = restarts;
  if (*iterations_opt) cfg.max_iterations = max_iterations;
  return dispatch(cfg, out, err);
}

}  // namespace svet::cli
