// mixfid: build states, evaluate fidelity observables, run sweeps.
//
// Exit codes: 0 success, 2 config or input error, 3 invariant violation, 4 I/O error.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mixfid/harness/emit.hpp"
#include "mixfid/mixfid.hpp"
#include "mixfid/state_io.hpp"

namespace mh = mixfid::harness;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInvariant = 3;
constexpr int kExitIo = 4;

struct Flags {
  std::string config;
  std::string out;
  std::vector<std::string> formats;
  std::uint64_t seed = 0;
  int workers = 0;
  bool per_site = false;
  bool timing = false;
  std::string state;
  std::string model;
  int local_dim = 0;
  std::vector<int> sites;
  std::vector<double> q;
  int proxy_depth = 0;
  double numeric_p = 0.0;
  std::string boundary;
  long dimension_cap = 0;

  CLI::App* app = nullptr;
  bool given(const std::string& name) const { return app->count(name) > 0; }
};

void add_shared(CLI::App* sub, Flags& f) {
  f.app = sub;
  sub->add_option("--config", f.config, "JSON config file");
  sub->add_option("--out", f.out, "output directory (or file for 'model')");
  sub->add_option("--format", f.formats, "csv, json, svg (repeatable)");
  sub->add_option("--seed", f.seed, "random seed");
  sub->add_option("--workers", f.workers, "worker threads");
  sub->add_flag("--per-site", f.per_site, "evaluate every site instead of the center site times N");
  sub->add_flag("--timing", f.timing, "fill the seconds column");
  sub->add_option("--state", f.state, "import a state file instead of building a model");
  sub->add_option("--model", f.model, "src, swssb, ghz or bond_dephased");
  sub->add_option("--local-dim", f.local_dim, "local dimension n");
  sub->add_option("--sites", f.sites, "site counts");
  sub->add_option("--q", f.q, "bond dephasing strengths");
  sub->add_option("--proxy-depth", f.proxy_depth, "proxy chain depth");
  sub->add_option("--numeric-p", f.numeric_p, "finite-difference dephasing strength (0 disables)");
  sub->add_option("--boundary", f.boundary, "open or periodic");
  sub->add_option("--dimension-cap", f.dimension_cap, "largest Hilbert dimension allowed");
}

// defaults < config file < flags
mh::SweepConfig resolve(const Flags& f) {
  mh::SweepConfig cfg = f.config.empty() ? mh::SweepConfig{} : mh::load_config(f.config);
  if (f.given("--out")) cfg.out_dir = f.out;
  if (f.given("--format")) cfg.formats = f.formats;
  if (f.given("--seed")) cfg.seed = f.seed;
  if (f.given("--workers")) cfg.workers = f.workers;
  if (f.given("--per-site")) cfg.per_site = true;
  if (f.given("--timing")) cfg.timing = true;
  if (f.given("--model")) cfg.model = f.model;
  if (f.given("--local-dim")) cfg.local_dim = f.local_dim;
  if (f.given("--sites")) cfg.sites = f.sites;
  if (f.given("--q")) cfg.q = f.q;
  if (f.given("--proxy-depth")) cfg.proxy_depth = f.proxy_depth;
  if (f.given("--numeric-p")) cfg.numeric_p = f.numeric_p;
  if (f.given("--boundary")) cfg.boundary = mh::parse_boundary(f.boundary);
  if (f.given("--dimension-cap")) cfg.dimension_cap = f.dimension_cap;
  return cfg;
}

mixfid::ModelState load_imported(const std::string& path, const mh::SweepConfig& cfg) {
  mixfid::SystemSpec base;
  base.boundary = cfg.boundary;
  mixfid::DensityMatrix rho = mixfid::read_state(path, base);
  mixfid::ChargeOperatorSet ops(rho.system());
  return {std::move(rho), std::move(ops)};
}

// Single-state subcommands use the first site count and the first q.
mixfid::ModelState single_state(const Flags& f, const mh::SweepConfig& cfg, mh::SweepPoint& pt) {
  if (!f.state.empty()) return load_imported(f.state, cfg);
  pt.N = cfg.sites.front();
  if (!cfg.is_fixed_point()) pt.q = cfg.q.front();
  return mh::detail::build_model(cfg, pt);
}

// Files under --out when given, otherwise the first format on stdout.
void write_records(const std::vector<mh::SweepRecord>& recs, const mh::SweepConfig& cfg, const Flags& f,
                   const std::string& stem) {
  if (f.given("--out")) {
    for (const auto& path : mh::emit(recs, cfg.out_dir, cfg.formats, stem)) std::cerr << "wrote " << path << '\n';
  } else if (cfg.formats.front() == "json") {
    mh::write_json(std::cout, recs);
  } else if (cfg.formats.front() == "svg") {
    mh::write_svg(std::cout, recs);
  } else {
    mh::write_csv(std::cout, recs);
  }
}

int cmd_model(const Flags& f) {
  mh::SweepConfig cfg = resolve(f);
  cfg.validate();
  mh::SweepPoint pt;
  const mixfid::ModelState st = single_state(f, cfg, pt);
  const mixfid::SymmetryCheck sc = mixfid::check_strong_symmetry(st.rho, st.ops);
  std::cerr << "dim " << st.rho.dim() << "  trace defect " << st.rho.trace_defect() << "  strong "
            << (sc.strong ? "yes" : "no") << "  weak " << (sc.weak ? "yes" : "no") << '\n';
  if (f.given("--out")) {
    mixfid::write_state(f.out, st.rho);
    std::cerr << "wrote " << f.out << '\n';
  } else {
    mixfid::write_state(std::cout, st.rho);
  }
  return 0;
}

int cmd_correlators(const Flags& f) {
  mh::SweepConfig cfg = resolve(f);
  cfg.validate();
  mh::SweepPoint pt;
  const mixfid::ModelState st = single_state(f, cfg, pt);
  const mixfid::StateAnalysis a(st.rho, st.ops);
  std::ostringstream os;
  os << "i,j,distance,fidelity_corr,linear_re,linear_im,renyi2_bare,renyi2_normalized\n";
  const int lo = cfg.per_site ? 0 : st.rho.system().center_site();
  const int hi = cfg.per_site ? a.sites() : lo + 1;
  for (int i = lo; i < hi; ++i) {
    for (const auto& c : mixfid::correlator_row(a, i)) {
      os << c.i << ',' << c.j << ',' << mh::format_real(c.distance) << ',' << mh::format_real(c.fidelity_corr)
         << ',' << mh::format_real(c.linear_corr.real()) << ',' << mh::format_real(c.linear_corr.imag()) << ','
         << mh::format_real(c.renyi2_bare) << ',' << mh::format_real(c.renyi2_normalized) << '\n';
    }
  }
  if (!f.given("--out")) {
    std::cout << os.str();
    return 0;
  }
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  const std::string path = (std::filesystem::path(cfg.out_dir) / "correlators.csv").string();
  std::ofstream file(path, std::ios::binary);
  if (!file) throw mixfid::IoError("cannot open '" + path + "' for writing");
  file << os.str();
  if (!file.flush()) throw mixfid::IoError("write to '" + path + "' failed");
  std::cerr << "wrote " << path << '\n';
  return 0;
}

int cmd_quantity(const Flags& f, const std::string& quantity) {
  mh::SweepConfig cfg = resolve(f);
  cfg.quantities = {quantity};
  if (quantity == "susceptibility") cfg.quantities.insert("bounds");
  cfg.validate();
  mh::SweepPoint pt;
  const mixfid::ModelState st = single_state(f, cfg, pt);
  std::vector<mh::SweepRecord> recs{mh::evaluate_point(cfg, pt, f.state.empty() ? nullptr : &st)};
  if (f.state.empty()) recs[0].model = cfg.model;
  write_records(recs, cfg, f, quantity);
  return 0;
}

int cmd_sweep(const Flags& f) {
  mh::SweepConfig cfg = resolve(f);
  const auto recs = mh::run_sweep(cfg);
  for (const auto& path : mh::emit(recs, cfg.out_dir, cfg.formats, "sweep")) std::cerr << "wrote " << path << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mixfid: fidelity observables of strongly symmetric mixed states"};
  app.require_subcommand(1);
  Flags f_model, f_corr, f_sus, f_geo, f_prox, f_sweep;
  add_shared(app.add_subcommand("model", "build, validate and export a state"), f_model);
  add_shared(app.add_subcommand("correlators", "fidelity, linear and Renyi-2 correlators"), f_corr);
  add_shared(app.add_subcommand("susceptibility", "closed-form chi_F with bounds"), f_sus);
  add_shared(app.add_subcommand("geometry", "subadditivity gap of the Bures metric"), f_geo);
  add_shared(app.add_subcommand("proxies", "polynomial lower bounds on chi_F / eta"), f_prox);
  add_shared(app.add_subcommand("sweep", "evaluate a grid of system sizes and strengths"), f_sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (f_model.app->parsed()) return cmd_model(f_model);
    if (f_corr.app->parsed()) return cmd_correlators(f_corr);
    if (f_sus.app->parsed()) return cmd_quantity(f_sus, "susceptibility");
    if (f_geo.app->parsed()) return cmd_quantity(f_geo, "geometry");
    if (f_prox.app->parsed()) return cmd_quantity(f_prox, "proxies");
    if (f_sweep.app->parsed()) return cmd_sweep(f_sweep);
  } catch (const mixfid::InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const mixfid::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const mixfid::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}
