// pairqfi command-line front end: every subcommand runs one computation and
// emits a deterministic CSV table (LF endings, 12 significant digits, one
// '#' metadata line carrying the config hash, quadrature spec and seed).

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include "pairqfi/channels.hpp"
#include "pairqfi/csv.hpp"
#include "pairqfi/eigenstates.hpp"
#include "pairqfi/montecarlo.hpp"
#include "pairqfi/qfi.hpp"

namespace {

using namespace pairqfi;

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

struct CommonOptions {
  int nr = 80;
  int ntheta = 160;
  std::uint64_t seed = 42;
  std::string out = "-";
  std::string pupil = "clear";
  double pupil_sigma = 0.5;
};

std::string g_config_path_doc_only;

void add_common_options(CLI::App* cmd, CommonOptions& opt) {
  // Later occurrences win, so options read from a config file are overridden
  // by explicit command-line flags (the file is expanded in front of them).
  cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  cmd->add_option("--config", g_config_path_doc_only,
                  "flat key=value config file; command-line flags override it");
  cmd->add_option("--nr", opt.nr, "radial quadrature order")->capture_default_str();
  cmd->add_option("--ntheta", opt.ntheta, "angular quadrature order")->capture_default_str();
  cmd->add_option("--seed", opt.seed, "master RNG seed")->capture_default_str();
  cmd->add_option("--out", opt.out, "output CSV path ('-' for stdout)")->capture_default_str();
  cmd->add_option("--pupil", opt.pupil, "pupil kind: clear | gaussian")
      ->check(CLI::IsMember({"clear", "gaussian"}))
      ->capture_default_str();
  cmd->add_option("--pupil-sigma", opt.pupil_sigma,
                  "1/e^2 amplitude radius of the gaussian pupil")
      ->capture_default_str();
}

std::string trim(const std::string& text) {
  const std::size_t begin = text.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const std::size_t end = text.find_last_not_of(" \t\r");
  return text.substr(begin, end - begin + 1);
}

/// Expands `--config FILE` into `--key value` pairs placed directly after
/// the subcommand, so the file keys resolve against that subcommand's own
/// options (unknown keys fail the parse) and explicit flags override them.
std::vector<std::string> expand_config_args(int argc, char** argv) {
  std::vector<std::string> stripped;
  std::string config_path;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config") {
      if (i + 1 >= argc) throw ConfigError("--config needs a file path");
      config_path = argv[++i];
    } else if (arg.rfind("--config=", 0) == 0) {
      config_path = arg.substr(9);
    } else {
      stripped.push_back(arg);
    }
  }
  if (config_path.empty()) return stripped;
  if (stripped.empty() || stripped.front().empty() || stripped.front()[0] == '-')
    throw ConfigError("--config requires a subcommand");

  std::ifstream file(config_path);
  if (!file) throw ConfigError("cannot open config file: " + config_path);

  std::vector<std::string> args{stripped.front()};
  std::string line;
  int line_no = 0;
  while (std::getline(file, line)) {
    ++line_no;
    const std::string entry = trim(line);
    if (entry.empty() || entry[0] == '#' || entry[0] == ';') continue;
    const std::size_t eq = entry.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError(config_path + ":" + std::to_string(line_no) +
                        ": expected key=value");
    args.push_back("--" + trim(entry.substr(0, eq)));
    args.push_back(trim(entry.substr(eq + 1)));
  }
  args.insert(args.end(), stripped.begin() + 1, stripped.end());
  return args;
}

Vec3 parse_triple(const std::string& text, const char* what) {
  Vec3 v;
  char tail = 0;
  const int got =
      std::sscanf(text.c_str(), "%lf,%lf,%lf%c", &v.x, &v.y, &v.z, &tail);
  if (got != 3) throw ConfigError(std::string(what) + " must be 'x,y,z'");
  return v;
}

PupilFunction build_pupil(const CommonOptions& opt) {
  const QuadratureSpec spec{opt.nr, opt.ntheta, 2};
  if (opt.pupil == "clear") return PupilFunction::clear_circular(spec);
  if (!(opt.pupil_sigma > 0)) throw ConfigError("pupil-sigma must be positive");
  const double sigma = opt.pupil_sigma;
  PupilFunction pupil = PupilFunction::from_amplitude(
      [sigma](AperturePoint p) {
        return Complex(std::exp(-p.uu() / (2.0 * sigma * sigma)), 0.0);
      },
      spec);
  if (std::abs(pupil.normalization_rescale() - 1.0) > 1e-6)
    std::fprintf(stderr,
                 "warning: pupil amplitude rescaled by %.6g to satisfy the "
                 "normalization\n",
                 pupil.normalization_rescale());
  return pupil;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

std::string metadata_line(const std::string& command, const CommonOptions& opt,
                          const std::string& extra) {
  const std::string canon = command + ";nr=" + std::to_string(opt.nr) +
                            ";ntheta=" + std::to_string(opt.ntheta) +
                            ";seed=" + std::to_string(opt.seed) +
                            ";pupil=" + opt.pupil + ";" + extra;
  char hash[20];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(fnv1a(canon)));
  return "pairqfi " + command + " config_hash=" + hash +
         " nr=" + std::to_string(opt.nr) + " ntheta=" + std::to_string(opt.ntheta) +
         " seed=" + std::to_string(opt.seed);
}

void emit(const CsvTable& table, const std::string& out) {
  if (out == "-")
    table.write(std::cout);
  else
    table.write_file(out);
}

// --- qcrb-ll ---------------------------------------------------------------

int run_qcrb_ll(const CommonOptions& opt) {
  const PupilFunction pupil = build_pupil(opt);
  const Mat3 h = compute_h_ll(pupil);
  const Vec3 eig = eigenvalues_symmetric(h);
  if (eig.x <= 1e-10) throw SingularBlockError("H(ll)", eig.x);
  const Mat3 inv = adjugate_inverse(h);

  CsvTable table(metadata_line("qcrb-ll", opt, ""),
                 {"hll_xx", "hll_yy", "hll_zz", "hll_xy", "hll_xz", "hll_yz",
                  "qcrb_xx", "qcrb_yy", "qcrb_zz", "qcrb_xy", "qcrb_xz", "qcrb_yz"});
  const double row[] = {h(0, 0),   h(1, 1),   h(2, 2),   h(0, 1),
                        h(0, 2),   h(1, 2),   inv(0, 0), inv(1, 1),
                        inv(2, 2), inv(0, 1), inv(0, 2), inv(1, 2)};
  table.add_row(row);
  emit(table, opt.out);
  return 0;
}

// --- qcrb-ss ---------------------------------------------------------------

int run_qcrb_ss(const CommonOptions& opt, const std::string& axis,
                double start, double stop, double step, const std::string& l_str) {
  const PupilFunction pupil = build_pupil(opt);
  SweepSpec sweep;
  sweep.axis = axis == "x" ? 0 : (axis == "y" ? 1 : (axis == "z" ? 2 : -1));
  sweep.start = start;
  sweep.stop = stop;
  sweep.step = step;
  sweep.fixed_l = parse_triple(l_str, "--l");

  const std::vector<GridRow> rows = qcrb_grid(pupil, sweep);
  const std::string extra = "axis=" + axis + ";start=" + format_value(start) +
                            ";stop=" + format_value(stop) +
                            ";step=" + format_value(step) + ";l=" + l_str;
  CsvTable table(metadata_line("qcrb-ss", opt, extra),
                 {"l_x", "l_y", "l_z", "delta", "qcrb_sx", "qcrb_sy", "qcrb_sz",
                  "flag"});
  for (const GridRow& row : rows) {
    const double cells[] = {row.l.x,
                            row.l.y,
                            row.l.z,
                            row.delta,
                            row.qcrb_ss_diag.x,
                            row.qcrb_ss_diag.y,
                            row.qcrb_ss_diag.z,
                            row.degenerate ? 1.0 : 0.0};
    table.add_row(cells);
  }
  emit(table, opt.out);
  return 0;
}

// --- verify ----------------------------------------------------------------

int run_verify(const CommonOptions& opt, int samples) {
  if (samples < 1) throw ConfigError("--samples must be >= 1");
  const PupilFunction pupil = build_pupil(opt);

  CsvTable table(
      metadata_line("verify", opt, "samples=" + std::to_string(samples)),
      {"sample", "l_x", "l_y", "l_z", "s_x", "s_y", "s_z", "delta", "max_hsl",
       "identity_residual", "branch_residual", "flag"});

  double worst_hsl = 0.0, worst_identity = 0.0, worst_branch = 0.0;
  for (int i = 0; i < samples; ++i) {
    Philox4x32 rng(opt.seed, static_cast<std::uint64_t>(i));
    SceneParams scene;
    OverlapResult overlap;
    // rejection within the sample's own stream keeps runs independent
    do {
      scene.l = {uniform_double(rng, -1, 1), uniform_double(rng, -1, 1),
                 uniform_double(rng, -1, 1)};
      scene.s = {uniform_double(rng, -1, 1), uniform_double(rng, -1, 1),
                 uniform_double(rng, -1, 1)};
      overlap = compute_overlap(pupil, scene);
    } while (overlap.one_minus_delta_sq() <= 1e-4);

    const HslResidual hsl = compute_h_sl_residual(pupil, scene);
    const IdentityReport identities = eigen_identities_check(pupil, scene);

    MatrixElements el = compute_matrix_elements(pupil, scene, overlap);
    const Mat3 h_ss = compute_h_ss(el, overlap.delta);
    el.b = -el.b;
    const double branch = (h_ss - compute_h_ss(el, -overlap.delta)).max_abs();

    worst_hsl = std::max(worst_hsl, hsl.max_abs);
    worst_identity = std::max(worst_identity, identities.max_residual);
    worst_branch = std::max(worst_branch, branch);

    const double cells[] = {static_cast<double>(i), scene.l.x, scene.l.y,
                            scene.l.z,              scene.s.x, scene.s.y,
                            scene.s.z,              overlap.delta, hsl.max_abs,
                            identities.max_residual, branch, 0.0};
    table.add_row(cells);
  }
  const double summary[] = {-1.0, kNan, kNan, kNan,      kNan,           kNan,
                            kNan, kNan, worst_hsl, worst_identity, worst_branch,
                            0.0};
  table.add_row(summary);
  emit(table, opt.out);
  return 0;
}

// --- channels ---------------------------------------------------------------

int run_channels(const CommonOptions& opt, const std::string& l_str,
                 const std::string& s_str, int n_channels) {
  const PupilFunction pupil = build_pupil(opt);
  const ZernikeBasis basis = ZernikeBasis::noll(n_channels);
  const SceneParams scene{parse_triple(l_str, "--l"), parse_triple(s_str, "--s")};
  const ChannelModel model = channel_derivatives(pupil, basis, scene);

  std::vector<std::string> header;
  for (int n = 1; n <= n_channels; ++n) header.push_back("p" + std::to_string(n));
  header.push_back("pbar");
  const char* mu_names[] = {"dlx", "dly", "dlz"};
  for (int n = 1; n <= n_channels; ++n)
    for (const char* mu : mu_names)
      header.push_back("dp" + std::to_string(n) + "_" + mu);
  for (const char* mu : mu_names) header.push_back(std::string("dpbar_") + mu);

  std::vector<double> cells;
  for (double p : model.probs) cells.push_back(p);
  cells.push_back(model.p_residual);
  for (const Vec3& d : model.dprobs)
    for (int mu = 0; mu < 3; ++mu) cells.push_back(d[mu]);
  for (int mu = 0; mu < 3; ++mu) cells.push_back(model.dp_residual[mu]);

  CsvTable table(metadata_line("channels", opt,
                               "l=" + l_str + ";s=" + s_str +
                                   ";channels=" + std::to_string(n_channels)),
                 std::move(header));
  table.add_row(cells);
  emit(table, opt.out);
  return 0;
}

// --- fi ----------------------------------------------------------------------

int run_fi(const CommonOptions& opt, const std::string& l_str,
           const std::string& s_str, long long photons, int n_channels) {
  if (photons < 1) throw ConfigError("--photons must be >= 1");
  const PupilFunction pupil = build_pupil(opt);
  const ZernikeBasis basis = ZernikeBasis::noll(n_channels);
  const SceneParams scene{parse_triple(l_str, "--l"), parse_triple(s_str, "--s")};

  const ChannelModel model = channel_derivatives(pupil, basis, scene);
  const FisherMatrix fi = classical_fi(model, static_cast<double>(photons));
  for (int dropped : fi.dropped_channels)
    std::fprintf(stderr, "warning: channel %d below probability floor, dropped\n",
                 dropped);

  const Vec3 eig = eigenvalues_symmetric(fi.j_ll);
  const bool singular = eig.x <= 1e-10 * std::max(1.0, eig.z);
  const Mat3 crb = singular ? Mat3::diagonal(kNan, kNan, kNan)
                            : adjugate_inverse(fi.j_ll);
  const Vec3 qcrb =
      adjugate_inverse(compute_h_ll(pupil)).diag() / static_cast<double>(photons);

  CsvTable table(
      metadata_line("fi", opt,
                    "l=" + l_str + ";s=" + s_str + ";photons=" +
                        std::to_string(photons) +
                        ";channels=" + std::to_string(n_channels)),
      {"j_xx", "j_yy", "j_zz", "j_xy", "j_xz", "j_yz", "j_eig1", "j_eig2",
       "j_eig3", "crb_xx", "crb_yy", "crb_zz", "qcrb_xx", "qcrb_yy", "qcrb_zz",
       "flag"});
  const double cells[] = {fi.j_ll(0, 0), fi.j_ll(1, 1), fi.j_ll(2, 2),
                          fi.j_ll(0, 1), fi.j_ll(0, 2), fi.j_ll(1, 2),
                          eig.x,         eig.y,         eig.z,
                          crb(0, 0),     crb(1, 1),     crb(2, 2),
                          qcrb.x,        qcrb.y,        qcrb.z,
                          singular ? 1.0 : 0.0};
  table.add_row(cells);
  emit(table, opt.out);
  return 0;
}

// --- simulate -----------------------------------------------------------------

int run_simulate(const CommonOptions& opt, SimulationConfig config,
                 const std::string& l_str, const std::string& sigma_str,
                 int est_nr, int est_ntheta) {
  config.true_l = parse_triple(l_str, "--l");
  config.sigma_s = parse_triple(sigma_str, "--sigma-s");
  config.seed = opt.seed;
  config.estimator_quadrature = QuadratureSpec{est_nr, est_ntheta, 2};
  config.validate();

  const PupilFunction pupil = build_pupil(opt);
  const ZernikeBasis basis = ZernikeBasis::noll(config.n_channels);
  const EstimationReport report = run_experiment(config, pupil, basis);

  const std::string extra =
      "l=" + l_str + ";sigma=" + sigma_str +
      ";draws=" + std::to_string(config.n_centroid_draws) +
      ";frames=" + std::to_string(config.frames_per_draw) +
      ";photons=" + std::to_string(config.photons_per_frame) +
      ";channels=" + std::to_string(config.n_channels) +
      ";multistart=" + std::to_string(config.estimator.multistart) +
      ";tol=" + format_value(config.estimator.tolerance) + ";est=" +
      std::to_string(est_nr) + "x" + std::to_string(est_ntheta);
  CsvTable table(metadata_line("simulate", opt, extra),
                 {"kind", "draw", "s_x", "s_y", "s_z", "var_lx", "var_ly",
                  "var_lz", "crb_xx", "crb_yy", "crb_zz", "flagged"});

  auto row = [&table](const std::string& kind, double draw, const Vec3& s,
                      const Vec3& var, const Vec3& crb, double flagged) {
    std::vector<std::string> cells{kind,
                                   format_value(draw),
                                   format_value(s.x),
                                   format_value(s.y),
                                   format_value(s.z),
                                   format_value(var.x),
                                   format_value(var.y),
                                   format_value(var.z),
                                   format_value(crb.x),
                                   format_value(crb.y),
                                   format_value(crb.z),
                                   format_value(flagged)};
    table.add_row(std::move(cells));
  };

  const Vec3 nans{kNan, kNan, kNan};
  for (const DrawReport& d : report.draws)
    row("draw", d.draw_index, d.s, d.estimate_variance, d.crb_diag,
        d.flagged_frames);
  row("mean", -1, nans, report.variance_mean, report.crb_draw_avg_diag,
      report.total_flagged);
  row("std", -1, nans, report.variance_std, nans, kNan);
  row("crb_s0", -1, Vec3{}, nans, report.crb_s0_diag, kNan);
  row("qcrb", -1, nans, nans, report.qcrb_diag, kNan);

  emit(table, opt.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum and classical Fisher-information limits for joint 3D "
               "centroid-separation estimation of an incoherent source pair",
               "pairqfi"};
  app.require_subcommand(1);

  CommonOptions opt;

  // qcrb-ll
  CLI::App* qcrb_ll = app.add_subcommand(
      "qcrb-ll", "separation QFI H(ll) and its inverse for the pupil");
  add_common_options(qcrb_ll, opt);

  // qcrb-ss
  CLI::App* qcrb_ss = app.add_subcommand(
      "qcrb-ss", "sweep of the centroid QCRB diagonal over one l component");
  add_common_options(qcrb_ss, opt);
  std::string axis = "x";
  double start = 0.02, stop = 1.0, step = 0.02;
  std::string l_fixed = "0,0.1,0.025";
  qcrb_ss->add_option("--axis", axis, "swept component: x | y | z")
      ->check(CLI::IsMember({"x", "y", "z"}))
      ->capture_default_str();
  qcrb_ss->add_option("--start", start, "sweep start")->capture_default_str();
  qcrb_ss->add_option("--stop", stop, "sweep stop")->capture_default_str();
  qcrb_ss->add_option("--step", step, "sweep step")->capture_default_str();
  qcrb_ss->add_option("--l", l_fixed, "fixed l components (swept one ignored)")
      ->capture_default_str();

  // verify
  CLI::App* verify = app.add_subcommand(
      "verify", "identity and off-diagonal-block residuals on random scenes");
  add_common_options(verify, opt);
  int samples = 100;
  verify->add_option("--samples", samples, "number of random scenes")
      ->capture_default_str();

  // channels
  CLI::App* channels = app.add_subcommand(
      "channels", "Zernike channel probabilities and their l-derivatives");
  add_common_options(channels, opt);
  std::string l_scene = "0.2,0.025,0.025";
  std::string s_scene = "0,0,0";
  int n_channels = 4;
  channels->add_option("--l", l_scene, "separation vector")->capture_default_str();
  channels->add_option("--s", s_scene, "centroid vector")->capture_default_str();
  channels->add_option("--channels", n_channels, "number of Zernike channels")
      ->capture_default_str();

  // fi
  CLI::App* fi = app.add_subcommand(
      "fi", "multinomial Fisher information, classical CRB and QCRB");
  add_common_options(fi, opt);
  std::string l_fi = "0.2,0.025,0.025";
  std::string s_fi = "0,0,0";
  long long photons_fi = 1000000;
  int channels_fi = 4;
  fi->add_option("--l", l_fi, "separation vector")->capture_default_str();
  fi->add_option("--s", s_fi, "centroid vector")->capture_default_str();
  fi->add_option("--photons", photons_fi, "photon count M")->capture_default_str();
  fi->add_option("--channels", channels_fi, "number of Zernike channels")
      ->capture_default_str();

  // simulate
  CLI::App* simulate = app.add_subcommand(
      "simulate", "multinomial ML estimation experiment against CRB/QCRB");
  add_common_options(simulate, opt);
  SimulationConfig config;
  std::string l_sim = "0.2,0.025,0.025";
  std::string sigma_sim = "0,0,0";
  int est_nr = 40, est_ntheta = 80;
  simulate->add_option("--l", l_sim, "true separation vector")->capture_default_str();
  simulate->add_option("--sigma-s", sigma_sim, "centroid jitter std devs")
      ->capture_default_str();
  simulate->add_option("--draws", config.n_centroid_draws, "centroid draws")
      ->capture_default_str();
  simulate->add_option("--frames", config.frames_per_draw, "frames per draw")
      ->capture_default_str();
  simulate->add_option("--photons", config.photons_per_frame, "photons per frame")
      ->capture_default_str();
  simulate->add_option("--channels", config.n_channels, "number of Zernike channels")
      ->capture_default_str();
  simulate->add_option("--threads", config.threads, "worker threads over frames")
      ->capture_default_str();
  simulate->add_option("--multistart", config.estimator.multistart,
                       "ML multistart count")
      ->capture_default_str();
  simulate->add_option("--tol", config.estimator.tolerance,
                       "ML simplex tolerance on the parameter step")
      ->capture_default_str();
  simulate->add_option("--max-iter", config.estimator.max_iterations,
                       "ML iteration cap per start")
      ->capture_default_str();
  simulate->add_option("--est-nr", est_nr, "estimator radial quadrature order")
      ->capture_default_str();
  simulate->add_option("--est-ntheta", est_ntheta,
                       "estimator angular quadrature order")
      ->capture_default_str();

  std::vector<std::string> args;
  try {
    args = expand_config_args(argc, argv);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  }
  std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
  try {
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (qcrb_ll->parsed()) return run_qcrb_ll(opt);
    if (qcrb_ss->parsed()) return run_qcrb_ss(opt, axis, start, stop, step, l_fixed);
    if (verify->parsed()) return run_verify(opt, samples);
    if (channels->parsed()) return run_channels(opt, l_scene, s_scene, n_channels);
    if (fi->parsed()) return run_fi(opt, l_fi, s_fi, photons_fi, channels_fi);
    if (simulate->parsed())
      return run_simulate(opt, config, l_sim, sigma_sim, est_nr, est_ntheta);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const DegenerateSceneError& e) {
    std::fprintf(stderr, "degeneracy error: %s\n", e.what());
    return 3;
  } catch (const OscillationError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const InternalConsistencyError& e) {
    std::fprintf(stderr, "internal consistency error: %s\n", e.what());
    return 4;
  } catch (const SingularBlockError& e) {
    std::fprintf(stderr, "degeneracy error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
