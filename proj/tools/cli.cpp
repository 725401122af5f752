#include "cli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "superdiff/corridors.hpp"
#include "superdiff/error.hpp"
#include "superdiff/limit_stats.hpp"
#include "superdiff/moments.hpp"
#include "superdiff/normalizers.hpp"
#include "superdiff/oracle.hpp"
#include "superdiff/parallel.hpp"
#include "superdiff/series.hpp"
#include "superdiff/sources.hpp"
#include "superdiff/table_io.hpp"
#include "superdiff/tails.hpp"
#include "superdiff/truncation.hpp"

#ifndef SUPERDIFF_VERSION
#define SUPERDIFF_VERSION "dev"
#endif

namespace superdiff::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr const char* kCheckpointFormat = "superdiff-lil-checkpoint/1";
constexpr const char* kCheckpointFile = "lil.ckpt";

// Stream-id namespaces of the subcommands.
constexpr std::uint64_t kTagSimulate = 16;
constexpr std::uint64_t kTagTails = 11;
constexpr std::uint64_t kTagClt = 12;
constexpr std::uint64_t kTagLil = 13;
constexpr std::uint64_t kTagMoments = 14;
constexpr std::uint64_t kTagMixing = 15;
constexpr std::uint64_t kTagOracle = 17;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string part; std::getline(in, part, sep);) out.push_back(trim(part));
  return out;
}

}  // namespace

std::uint64_t parse_count(const std::string& raw) {
  const std::string text = trim(raw);
  auto bad = [&] { return Error(ErrorCode::InvalidArgument, "not a count: '" + raw + "'"); };
  if (text.empty()) throw bad();
  try {
    if (const auto caret = text.find('^'); caret != std::string::npos) {
      std::size_t used = 0;
      const std::uint64_t base = std::stoull(text.substr(0, caret), &used);
      if (used != caret) throw bad();
      const std::string e = text.substr(caret + 1);
      const unsigned long exponent = std::stoul(e, &used);
      if (used != e.size() || base < 1) throw bad();
      std::uint64_t v = 1;
      for (unsigned long i = 0; i < exponent; ++i) {
        if (v > UINT64_MAX / base) throw Error(ErrorCode::InvalidArgument, "count overflows: '" + raw + "'");
        v *= base;
      }
      return v;
    }
    if (text.find_first_of(".eE") != std::string::npos) {
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used != text.size() || !(v >= 0) || v != std::floor(v) || v > 1.8e19) throw bad();
      return static_cast<std::uint64_t>(v);
    }
    if (text.front() == '-') throw bad();
    std::size_t used = 0;
    const std::uint64_t v = std::stoull(text, &used);
    if (used != text.size()) throw bad();
    return v;
  } catch (const std::logic_error&) {
    throw bad();
  }
}

double parse_real(const std::string& raw) {
  const std::string text = trim(raw);
  if (text.find('^') != std::string::npos) return static_cast<double>(parse_count(text));
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size() && std::isfinite(v)) return v;
  } catch (const std::logic_error&) {
  }
  throw Error(ErrorCode::InvalidArgument, "not a number: '" + raw + "'");
}

std::vector<std::uint64_t> parse_count_grid(const std::string& text) {
  std::vector<std::uint64_t> out;
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    const std::uint64_t lo = parse_count(text.substr(0, dots));
    const std::uint64_t hi = parse_count(text.substr(dots + 2));
    if (lo == 0 || hi < lo) throw Error(ErrorCode::InvalidArgument, "bad range: '" + text + "'");
    for (std::uint64_t v = lo; v <= hi; v *= 2) {
      out.push_back(v);
      if (v > UINT64_MAX / 2) break;
    }
    return out;
  }
  for (const auto& part : split(text, ',')) out.push_back(parse_count(part));
  if (out.empty()) throw Error(ErrorCode::InvalidArgument, "empty grid");
  return out;
}

std::vector<double> parse_real_grid(const std::string& text) {
  std::vector<double> out;
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    for (std::uint64_t v : parse_count_grid(text)) out.push_back(static_cast<double>(v));
    return out;
  }
  for (const auto& part : split(text, ',')) out.push_back(parse_real(part));
  if (out.empty()) throw Error(ErrorCode::InvalidArgument, "empty grid");
  return out;
}

double parse_power_rule(const std::string& raw) {
  const std::string text = trim(raw);
  if (text.size() < 3 || text[0] != 'm' || text[1] != '^')
    throw Error(ErrorCode::InvalidArgument, "rule must look like m^0.6: '" + raw + "'");
  return parse_real(text.substr(2));
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

namespace {

// ---- options ------------------------------------------------------------------

struct Options {
  std::uint64_t seed = 1;
  std::size_t workers = parallel::default_workers();
  std::size_t shards = 8;
  std::string out = ".";
  bool verify = false;

  // source
  std::string source;
  std::string table;
  double radius = 0.25;
  std::string observable = "kappa";
  double scale = 1.0;
  int dim = 1;

  std::string nmax;
  std::size_t streams = 0;
  std::string checkpoint;
  std::string checkpoint_every = "2^20";
  std::string stop_after;

  int max_norm = 20;
  std::string tail_collisions = "2^20";

  double C = 1.0;
  bool C_given = false;
  std::vector<double> C_list;
  double C0 = 1.0;
  std::string ell1 = "cnlg";
  double varsigma = 0.1;
  int max_exp = 40;

  double a_coef = 2.0;
  std::string alphas = "0.8,0.9,1,1.1,1.2";
  int bisect = 0;

  std::string n_range = "8";

  std::string m_grid = "2^8..2^14";
  std::string r_rule = "m^0.6";
  std::size_t blocks_per_shard = 250;
  std::string R_grid;
  std::string cov_m = "10^5";

  std::string n = "10^4";
  std::size_t samples = 10000;

  std::string normalizer;
  double lambda = 1.0;
  std::string burn_in = "2^10";

  double R = 64.0;
  std::string q_grid = "0,1,2,3,4,6,8,12,16,24,32";
  std::uint64_t past = 16;
  std::string length = "2^18";

  std::string clt_n = "10^4";
  std::size_t clt_samples = 10000;
  std::string draws = "10^6";
};

template <class F>
auto flag(const char* name, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    std::string what = e.what();
    const std::string prefix = std::string(to_string(e.code())) + ": ";
    if (what.starts_with(prefix)) what.erase(0, prefix.size());
    throw Error(e.code(), std::string(name) + ": " + what);
  }
}

// ---- outputs and gates --------------------------------------------------------

struct Gate {
  std::string name;
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool pass = false;
};

class Run {
 public:
  Run(std::string command, const Options& opt) : command_(std::move(command)), opt_(opt), dir_(opt.out) {}

  void write(const std::string& name, const std::string& content) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + (dir_ / name).string());
    out << content;
    if (!out) throw Error(ErrorCode::Io, "write failed for " + (dir_ / name).string());
    if (std::find(files_.begin(), files_.end(), name) == files_.end()) files_.push_back(name);
  }

  void gate(std::string name, double value, double lo, double hi) {
    const bool pass = value >= lo && value <= hi;
    gates_.push_back({std::move(name), value, lo, hi, pass});
  }

  ordered_json& config() { return config_; }

  int finish() {
    ordered_json m;
    m["command"] = command_;
    m["version"] = SUPERDIFF_VERSION;
    m["seed"] = opt_.seed;
    m["workers"] = opt_.workers;
    m["shards"] = opt_.shards;
    m["config"] = config_;
    m["outputs"] = files_;
    if (opt_.verify) {
      ordered_json g = ordered_json::array();
      for (const auto& x : gates_)
        g.push_back({{"name", x.name}, {"value", x.value}, {"lo", x.lo}, {"hi", x.hi}, {"pass", x.pass}});
      m["verify"] = g;
    }
    write("manifest.json", m.dump(2) + "\n");
    if (!opt_.verify) return kExitOk;
    bool ok = true;
    for (const auto& x : gates_) {
      std::printf("%s %s = %.6g in [%.6g, %.6g]\n", x.pass ? "PASS" : "FAIL", x.name.c_str(), x.value, x.lo, x.hi);
      ok = ok && x.pass;
    }
    return ok ? kExitOk : kExitVerifyFailed;
  }

 private:
  std::string command_;
  const Options& opt_;
  fs::path dir_;
  std::vector<std::string> files_;
  std::vector<Gate> gates_;
  ordered_json config_;
};

// ---- sources ------------------------------------------------------------------

ordered_json source_config(const Options& opt, const char* default_kind) {
  const std::string kind = opt.source.empty() ? default_kind : opt.source;
  const auto k = sources::parse_source(kind);
  ordered_json j;
  j["kind"] = sources::to_string(k);
  if (k == sources::SourceKind::Lorentz) {
    const auto table = opt.table.empty() ? table_io::single_disc(opt.radius) : table_io::load_table(opt.table);
    j["table"] = ordered_json::parse(table_io::table_to_json(table));
    if (opt.observable != "kappa" && opt.observable != "phi")
      throw Error(ErrorCode::InvalidArgument, "--observable must be kappa or phi");
    j["observable"] = opt.observable;
  } else {
    j["scale"] = opt.scale;
    j["dimension"] = opt.dim;
  }
  return j;
}

sources::SourceSpec make_source(const ordered_json& config, std::uint64_t seed) {
  sources::SourceSpec spec;
  spec.kind = sources::parse_source(config.at("kind").get<std::string>());
  spec.seed = seed;
  if (spec.kind == sources::SourceKind::Lorentz) {
    spec.table = std::make_shared<billiard::BilliardTable>(table_io::parse_table(config.at("table").dump()));
    spec.observable = config.value("observable", "kappa") == "phi" ? sources::Observable::Phi : sources::Observable::Kappa;
  } else {
    spec.scale = config.at("scale").get<double>();
    spec.dimension = config.at("dimension").get<int>();
  }
  return spec;
}

moments::ProbeConfig probe_config(const Options& opt, std::uint64_t tag) {
  if (opt.shards == 0) throw Error(ErrorCode::InvalidArgument, "--shards must be positive");
  moments::ProbeConfig p;
  p.shards = opt.shards;
  p.workers = std::max<std::size_t>(1, opt.workers);
  p.blocks_per_shard = opt.blocks_per_shard;
  p.tag = tag;
  return p;
}

std::vector<Vec2> draw_values(const sources::SourceSpec& spec, std::uint64_t n, const moments::ProbeConfig& probe) {
  std::vector<Vec2> values(n);
  const std::uint64_t per = n / probe.shards;
  parallel::for_each_shard(probe.shards, probe.workers, [&](std::size_t s) {
    const std::uint64_t begin = s * per;
    const std::uint64_t end = s + 1 == probe.shards ? n : begin + per;
    sources::Source src(spec, sources::stream_id(probe.tag, s));
    src.fill(std::span<Vec2>(values).subspan(begin, end - begin));
  });
  return values;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---- subcommands ----------------------------------------------------------------

void cmd_simulate(const Options& opt, Run& run) {
  const auto src = source_config(opt, "lorentz");
  if (src["kind"] != "lorentz") throw Error(ErrorCode::InvalidArgument, "--source: simulate needs the lorentz source");
  const auto table = table_io::parse_table(src["table"].dump());
  const std::uint64_t n = flag("--nmax", [&] { return parse_count(opt.nmax.empty() ? "2^16" : opt.nmax); });
  const std::size_t streams = opt.streams == 0 ? 1 : opt.streams;
  std::vector<std::uint64_t> schedule;
  for (std::uint64_t s = 1; s < n; s *= 2) schedule.push_back(s);
  schedule.push_back(n);
  run.config() = {{"source", src}, {"nmax", n}, {"streams", streams}, {"schedule", "dyadic"}};

  std::vector<std::string> csv(streams);
  std::vector<double> gaps(streams);
  const auto probe = probe_config(opt, kTagSimulate);
  parallel::for_each_shard(probe.shards, probe.workers, [&](std::size_t shard) {
    for (std::size_t i = shard; i < streams; i += probe.shards) {
      RngStream rng(opt.seed, sources::stream_id(kTagSimulate, i));
      const auto start = billiard::InvariantSampler(table)(rng);
      const auto summary = billiard::birkhoff(table, start, n, schedule);
      csv[i] = table_io::trajectory_csv(summary);
      gaps[i] = summary.coboundary_gap;
    }
  });
  for (std::size_t i = 0; i < streams; ++i) run.write("trajectory_" + std::to_string(i) + ".csv", csv[i]);
  for (std::size_t i = 0; i < streams; ++i) run.gate("coboundary_gap_" + std::to_string(i), gaps[i], 0.0, 2.0);
}

void cmd_corridors(const Options& opt, Run& run) {
  const auto table = opt.table.empty() ? table_io::single_disc(opt.radius) : table_io::load_table(opt.table);
  const auto list = corridors::enumerate_corridors(table, opt.max_norm);
  std::string csv = "xi_a,xi_b,width,offset,c_xi_hat\n";
  char buf[160];
  for (const auto& c : list) {
    std::snprintf(buf, sizeof buf, "%lld,%lld,%.17g,%.17g,%.17g\n", c.xi.x, c.xi.y, c.width, c.offset, c.c_xi_hat);
    csv += buf;
  }
  const auto nd = corridors::nondegeneracy_check(list, table.dimension());
  run.config() = {{"table", ordered_json::parse(table_io::table_to_json(table))}, {"max_norm", opt.max_norm}};
  run.write("corridors.csv", csv);
  ordered_json j;
  j["infinite_horizon"] = table.infinite_horizon();
  j["corridors"] = list.size();
  j["nondegenerate"] = nd.holds;
  j["reason"] = nd.reason;
  run.write("corridors.json", j.dump(2) + "\n");
  run.gate("corridor_count", static_cast<double>(list.size()), 1, 1e18);
}

std::vector<Vec2i> corridor_directions(const billiard::BilliardTable& table) {
  std::vector<Vec2i> dirs;
  for (const auto& c : corridors::enumerate_corridors(table, 3))
    if (std::find(dirs.begin(), dirs.end(), c.xi) == dirs.end()) dirs.push_back(c.xi);
  return dirs;
}

void cmd_tails(const Options& opt, Run& run) {
  const auto src = source_config(opt, "lorentz");
  const auto spec = make_source(src, opt.seed);
  const std::uint64_t n = flag("--nmax", [&] { return parse_count(opt.nmax.empty() ? "2^20" : opt.nmax); });
  const auto probe = probe_config(opt, kTagTails);
  tails::TailFitConfig fit;
  if (spec.table) fit.corridor_directions = corridor_directions(*spec.table);
  run.config() = {{"source", src}, {"collisions", n}};
  const auto values = draw_values(spec, n, probe);
  const auto est = tails::tail_fit(values, fit);
  run.write("tails.json", tails::to_json(est));
  std::string csv = "t,exceedances,survival\n";
  for (const auto& p : est.survival)
    csv += fmt("%.17g", p.t) + "," + std::to_string(p.exceedances) + "," + fmt("%.17g", p.survival) + "\n";
  run.write("survival.csv", csv);
  run.gate("alpha_hat", est.alpha_hat, 1.85, 2.15);
  for (const auto& c : est.per_corridor) {
    if (c.bins < 3) continue;
    run.gate("corridor_slope_" + std::to_string(c.xi.x) + "_" + std::to_string(c.xi.y), c.slope, -3.2, -2.8);
  }
}

normalizers::NormalizerConfig normalizer_config(const Options& opt) {
  normalizers::NormalizerConfig c;
  c.C = opt.C;
  c.C0 = opt.C0;
  c.ell1 = flag("--ell1", [&] { return normalizers::Ell1::parse(opt.ell1); });
  c.varsigma = opt.varsigma;
  c.dimension = opt.dim;
  normalizers::validate(c);
  return c;
}

void cmd_normalizers(const Options& opt, Run& run) {
  const auto config = normalizer_config(opt);
  if (opt.max_exp < 0 || opt.max_exp > 1000) throw Error(ErrorCode::InvalidArgument, "--max-exp out of range");
  run.config() = {{"C", config.C},
                  {"C0", config.C0},
                  {"ell1", config.ell1.describe()},
                  {"varsigma", config.varsigma},
                  {"dimension", config.dimension},
                  {"max_exp", opt.max_exp}};
  run.write("normalizers.csv", normalizers::to_csv(normalizers::normalizer_sequence(config, opt.max_exp)));
  ordered_json j;
  j["ordering_crossover_log_n"] = normalizers::ordering_crossover_log_n(config);
  run.write("normalizers.json", j.dump(2) + "\n");
}

void cmd_series(const Options& opt, Run& run) {
  const auto alphas = flag("--alphas", [&] { return parse_real_grid(opt.alphas); });
  series::SeriesConfig config;
  config.a_coef = opt.a_coef;
  const auto ell1 = flag("--ell1", [&] { return normalizers::Ell1::parse(opt.ell1); });
  run.config() = {{"C", opt.C}, {"a_coef", opt.a_coef}, {"alphas", alphas}, {"bisect", opt.bisect}, {"ell1", ell1.describe()}};
  const auto diag = series::series_diagnostic(config, series::c_star_sequence(opt.C), alphas, opt.bisect);
  run.write("series.json", series::to_json(diag));
  const auto hl0 = series::hl0_verify(ell1);
  run.write("hl0.json", series::to_json(hl0));
  const auto i50 = series::appendix_integral(50.0);
  const auto i100 = series::appendix_integral(100.0);
  ordered_json app;
  app["integrand"] = "y/(1+e^y sin^2 y)";
  app["y_max"] = {i50.y_max, i100.y_max};
  app["value"] = {i50.value, i100.value};
  app["error"] = {i50.error, i100.error};
  app["tail_bound"] = {i50.tail_bound, i100.tail_bound};
  app["difference"] = std::abs(i100.value - i50.value);
  run.write("appendix.json", app.dump(2) + "\n");

  for (const auto& r : diag.per_alpha) {
    if (std::abs(r.alpha - 0.8) < 1e-12)
      run.gate("divergent_at_0.8", r.run.verdict == series::Verdict::Divergent, 1, 1);
    if (std::abs(r.alpha - 1.2) < 1e-12)
      run.gate("convergent_at_1.2", r.run.verdict == series::Verdict::Convergent, 1, 1);
  }
  const bool cnlg = ell1.describe() == normalizers::Ell1::cnlg().describe();
  const auto want = cnlg ? series::Verdict::Convergent : series::Verdict::Divergent;
  if (cnlg || ell1.describe() == normalizers::Ell1::constant(1.0).describe()) {
    run.gate("hl0_ii", hl0.ii.verdict == want, 1, 1);
    run.gate("hl0_iii", hl0.iii.verdict == want, 1, 1);
    run.gate("hl0_iiiw", hl0.iiiw.verdict == want, 1, 1);
  }
  run.gate("appendix_stability", std::abs(i100.value - i50.value), 0, 1e-6);
}

void cmd_blocks(const Options& opt, Run& run) {
  int lo = 0, hi = 0;
  flag("--n", [&] {
    const auto dots = opt.n_range.find("..");
    lo = static_cast<int>(parse_count(opt.n_range.substr(0, dots)));
    hi = dots == std::string::npos ? lo : static_cast<int>(parse_count(opt.n_range.substr(dots + 2)));
    if (hi < lo || hi > 62) throw Error(ErrorCode::InvalidArgument, "bad level range");
    return 0;
  });
  run.config() = {{"n_first", lo}, {"n_last", hi}, {"beta", 0.5}, {"eps1", 0.25}};
  std::string csv;
  bool exact = true;
  for (int n = lo; n <= hi; ++n) {
    const auto layout = truncation::block_decomposition(n);
    const std::string part = truncation::to_csv(layout);
    csv += csv.empty() ? part : part.substr(part.find('\n') + 1);
    std::uint64_t next = std::uint64_t{1} << n;
    for (const auto& b : layout.blocks) {
      exact = exact && b.start == next && b.length > 0;
      next = b.start + b.length;
    }
    exact = exact && next == std::uint64_t{1} << (n + 1);
  }
  run.write("blocks.csv", csv);
  run.gate("exact_partition", exact, 1, 1);
}

void cmd_moments(const Options& opt, Run& run) {
  const auto src = source_config(opt, "pareto");
  const auto spec = make_source(src, opt.seed);
  const auto grid = flag("--m-grid", [&] { return parse_count_grid(opt.m_grid); });
  const double exponent = flag("--r-rule", [&] { return parse_power_rule(opt.r_rule); });
  const auto probe = probe_config(opt, kTagMoments);
  run.config() = {{"source", src},
                  {"m_grid", grid},
                  {"r_exponent", exponent},
                  {"blocks_per_shard", opt.blocks_per_shard}};
  const auto reports = moments::fourth_moment_ratio(spec, grid, {exponent}, {}, probe);
  for (const auto& r : reports) {
    run.write(std::string("moments_") + moments::to_string(r.projection) + ".csv", moments::to_csv(r));
    if (r.projection == moments::Projection::Full) run.gate("log_slope", r.log_slope, -0.05, 0.05);
  }
  if (!opt.R_grid.empty()) {
    const auto Rs = flag("--R-grid", [&] { return parse_real_grid(opt.R_grid); });
    const std::uint64_t m = flag("--cov-m", [&] { return parse_count(opt.cov_m); });
    run.config()["R_grid"] = Rs;
    run.config()["cov_m"] = m;
    auto cp = probe;
    cp.tag = kTagMoments + 100;
    const auto cov = moments::truncated_cov(spec, m, Rs, cp);
    std::string csv = "R,cov11,cov12,cov22,ratio2,ratio2_se\n";
    char buf[256];
    for (const auto& row : cov.rows) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", row.R, row.cov.xx, row.cov.xy, row.cov.yy,
                    row.ratio2, row.ratio2_se);
      csv += buf;
    }
    run.write("cov.csv", csv);
  }
}

std::vector<double> tail_constants(const Options& opt, const sources::SourceSpec& spec, ordered_json& config) {
  if (!opt.C_list.empty()) return opt.C_list;
  if (spec.kind != sources::SourceKind::Lorentz) {
    const double c = spec.kind == sources::SourceKind::Pareto ? spec.scale * spec.scale : 1.0;
    return {c};
  }
  const std::uint64_t n = flag("--tail-collisions", [&] { return parse_count(opt.tail_collisions); });
  config["tail_collisions"] = n;
  auto probe = probe_config(opt, kTagTails + 100);
  const auto values = draw_values(spec, n, probe);
  std::vector<double> out;
  for (int c = 0; c < spec.table->dimension(); ++c) {
    std::vector<double> comp(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) comp[i] = c == 0 ? values[i].x : values[i].y;
    out.push_back(tails::tail_fit(std::span<const double>(comp)).C_hat);
  }
  return out;
}

void cmd_clt(const Options& opt, Run& run) {
  const auto src = source_config(opt, "pareto");
  const auto spec = make_source(src, opt.seed);
  const std::uint64_t n = flag("--n", [&] { return parse_count(opt.n); });
  const auto probe = probe_config(opt, kTagClt);
  run.config() = {{"source", src}, {"n", n}, {"samples", opt.samples}};
  const auto C = tail_constants(opt, spec, run.config());
  run.config()["C_hat"] = C;
  const auto report = limit_stats::clt_experiment(spec, n, opt.samples, C, probe);
  run.write("clt.json", limit_stats::to_json(report));
  const bool lorentz = spec.kind == sources::SourceKind::Lorentz;
  const double ks_max = lorentz ? 0.08 : (spec.kind == sources::SourceKind::Gaussian ? 0.02 : 0.05);
  for (std::size_t c = 0; c < report.components.size(); ++c) {
    const auto& comp = report.components[c];
    run.gate("ks_fitted_" + std::to_string(c), comp.ks_fitted, 0.0, ks_max);
    if (spec.kind == sources::SourceKind::Pareto) run.gate("ks_sqrt_n_" + std::to_string(c), comp.ks_sqrt_n, 0.1, 1.0);
  }
  run.gate("split_half_z", report.split_half_z, 0.0, 3.0);
}

// ---- LIL with checkpoints --------------------------------------------------------

struct LilPlan {
  ordered_json config;
  std::uint64_t seed = 0;
  std::size_t shards = 0;
  std::size_t workers = 0;
  std::string out;
  std::uint64_t checkpoint_every = 0;
  std::string checkpoint_dir;
};

limit_stats::LilNormalizer lil_normalizer(const ordered_json& c) {
  limit_stats::LilNormalizer n;
  n.kind = c.at("normalizer") == "classical" ? limit_stats::LilNormalizer::Kind::Classical
                                             : limit_stats::LilNormalizer::Kind::CStar;
  n.C = c.at("C").get<double>();
  n.lambda = c.at("lambda").get<double>();
  return n;
}

limit_stats::LilSchedule lil_schedule(const ordered_json& c) {
  return {c.at("k_first").get<int>(), c.at("k_last").get<int>(), c.at("burn_in").get<std::uint64_t>()};
}

ordered_json state_json(const limit_stats::LilStreamState& s, const std::string& error) {
  const auto& f = s.source.flight;
  ordered_json j;
  j["emitted"] = s.source.emitted;
  j["rng_position"] = s.source.rng_position;
  j["started"] = s.source.started;
  j["resamples"] = s.source.resamples;
  j["flight"] = {f.scatterer, f.position.x, f.position.y, f.velocity.x, f.velocity.y};
  j["sum"] = {s.sum.x, s.sum.y};
  j["m"] = s.m;
  j["record"] = s.record;
  j["records"] = s.records;
  j["error"] = error;
  return j;
}

limit_stats::LilStreamState state_from_json(const ordered_json& j, std::string& error) {
  limit_stats::LilStreamState s;
  s.source.emitted = j.at("emitted").get<std::uint64_t>();
  s.source.rng_position = j.at("rng_position").get<std::uint64_t>();
  s.source.started = j.at("started").get<bool>();
  s.source.resamples = j.at("resamples").get<std::uint64_t>();
  const auto& f = j.at("flight");
  s.source.flight.scatterer = f.at(0).get<int>();
  s.source.flight.position = {f.at(1).get<double>(), f.at(2).get<double>()};
  s.source.flight.velocity = {f.at(3).get<double>(), f.at(4).get<double>()};
  s.sum = {j.at("sum").at(0).get<double>(), j.at("sum").at(1).get<double>()};
  s.m = j.at("m").get<std::uint64_t>();
  s.record = j.at("record").get<double>();
  s.records = j.at("records").get<std::vector<double>>();
  error = j.at("error").get<std::string>();
  return s;
}

void write_checkpoint(const LilPlan& plan, const std::vector<limit_stats::LilStreamState>& states,
                      const std::vector<std::string>& errors) {
  ordered_json body;
  body["format"] = kCheckpointFormat;
  body["version"] = SUPERDIFF_VERSION;
  body["seed"] = plan.seed;
  body["shards"] = plan.shards;
  body["workers"] = plan.workers;
  body["out"] = plan.out;
  body["checkpoint_every"] = plan.checkpoint_every;
  body["config"] = plan.config;
  ordered_json arr = ordered_json::array();
  for (std::size_t i = 0; i < states.size(); ++i) arr.push_back(state_json(states[i], errors[i]));
  body["streams"] = arr;
  const std::string text = body.dump() + "\n";
  char header[64];
  std::snprintf(header, sizeof header, "fnv1a64 %016llx\n", static_cast<unsigned long long>(fnv1a(text)));
  std::error_code ec;
  fs::create_directories(plan.checkpoint_dir, ec);
  const fs::path path = fs::path(plan.checkpoint_dir) / kCheckpointFile;
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write checkpoint " + tmp.string());
    out << header << text;
    if (!out) throw Error(ErrorCode::Io, "checkpoint write failed");
  }
  fs::rename(tmp, path);
}

int run_lil(const LilPlan& plan, std::vector<limit_stats::LilStreamState> states, std::vector<std::string> errors,
            std::uint64_t stop_after, const Options& opt, Run& run) {
  const auto spec = make_source(plan.config.at("source"), plan.seed);
  const auto normalizer = lil_normalizer(plan.config);
  const auto schedule = lil_schedule(plan.config);
  const std::uint64_t nmax = std::uint64_t{1} << schedule.k_last;
  const std::size_t streams = states.size();

  auto done = [&] {
    return std::all_of(states.begin(), states.end(), [&](const auto& s) { return s.m >= nmax; }) ||
           std::all_of(errors.begin(), errors.end(), [](const auto& e) { return !e.empty(); });
  };
  auto position = [&] {
    std::uint64_t lo = nmax;
    for (std::size_t i = 0; i < streams; ++i)
      if (errors[i].empty()) lo = std::min(lo, states[i].m);
    return lo;
  };

  while (!done()) {
    const std::uint64_t from = position();
    std::uint64_t target = std::min(nmax, from + plan.checkpoint_every);
    if (stop_after > from) target = std::min(target, stop_after);
    parallel::for_each_shard(plan.shards, plan.workers, [&](std::size_t shard) {
      for (std::size_t i = shard; i < streams; i += plan.shards) {
        if (!errors[i].empty()) continue;
        try {
          sources::Source src(spec, sources::stream_id(kTagLil, i));
          limit_stats::advance(states[i], src, normalizer, schedule, target);
        } catch (const Error& e) {
          errors[i] = e.what();
        }
      }
    });
    if (!plan.checkpoint_dir.empty()) write_checkpoint(plan, states, errors);
    std::fprintf(stderr, "lil: %llu / %llu steps per stream\n", static_cast<unsigned long long>(target),
                 static_cast<unsigned long long>(nmax));
    if (stop_after != 0 && target >= stop_after && target < nmax) {
      std::fprintf(stderr, "lil: stopped after %llu steps; resume from %s\n",
                   static_cast<unsigned long long>(target), plan.checkpoint_dir.c_str());
      return kExitOk;
    }
  }

  limit_stats::LilReport report;
  report.source = plan.config.at("source").at("kind").get<std::string>();
  report.normalizer = normalizer.describe();
  report.schedule = schedule;
  for (std::size_t i = 0; i < streams; ++i) report.streams.push_back({i, states[i].records, errors[i]});
  report = limit_stats::summarize(std::move(report));

  run.config() = plan.config;
  run.write("lil.csv", limit_stats::to_csv(report));
  run.write("lil.json", limit_stats::to_json(report));
  std::vector<double> alphas;
  for (int i = 0; i <= 30; ++i) alphas.push_back(0.1 * i);
  std::string csv = "alpha,fraction\n";
  for (const auto& p : limit_stats::exceedance_profile(report, alphas))
    csv += fmt("%.17g", p.alpha) + "," + fmt("%.17g", p.fraction) + "\n";
  run.write("exceedance.csv", csv);

  run.gate("records_nondecreasing", limit_stats::records_nondecreasing(report), 1, 1);
  const double med = report.median.empty() ? NAN : report.median.back();
  if (report.source == "gaussian" && normalizer.kind == limit_stats::LilNormalizer::Kind::Classical)
    run.gate("median_record", med, 0.6, 1.3);
  if (report.source == "pareto" && normalizer.kind == limit_stats::LilNormalizer::Kind::CStar) {
    run.gate("median_record", med, 0.4, 1.6);
    run.gate("median_nondecreasing_last8", limit_stats::median_nondecreasing(report, 8), 1, 1);
  }
  (void)opt;
  return run.finish();
}

int cmd_lil(const Options& opt, Run& run) {
  const auto src = source_config(opt, "pareto");
  const auto kind = sources::parse_source(src.at("kind").get<std::string>());
  const std::uint64_t nmax = flag("--nmax", [&] { return parse_count(opt.nmax.empty() ? "2^20" : opt.nmax); });
  if (!std::has_single_bit(nmax)) throw Error(ErrorCode::InvalidArgument, "--nmax: must be a power of two");
  const std::uint64_t burn_in = flag("--burn-in", [&] { return parse_count(opt.burn_in); });
  if (!std::has_single_bit(burn_in) || burn_in > nmax)
    throw Error(ErrorCode::InvalidArgument, "--burn-in: must be a power of two not above --nmax");
  const std::string norm = !opt.normalizer.empty() ? opt.normalizer
                           : kind == sources::SourceKind::Gaussian ? "classical"
                                                                    : "cstar";
  if (norm != "cstar" && norm != "classical")
    throw Error(ErrorCode::InvalidArgument, "--normalizer: must be cstar or classical");
  if (!(opt.lambda > 0)) throw Error(ErrorCode::InvalidArgument, "--lambda: must be positive");
  double C = opt.C;
  if (!opt.C_given && kind == sources::SourceKind::Pareto) C = opt.scale * opt.scale;

  LilPlan plan;
  plan.config = {{"source", src},
                 {"streams", opt.streams == 0 ? 64 : opt.streams},
                 {"nmax", nmax},
                 {"normalizer", norm},
                 {"C", C},
                 {"lambda", opt.lambda},
                 {"burn_in", burn_in},
                 {"k_first", std::countr_zero(burn_in)},
                 {"k_last", std::countr_zero(nmax)}};
  plan.seed = opt.seed;
  plan.shards = opt.shards;
  plan.workers = std::max<std::size_t>(1, opt.workers);
  plan.out = opt.out;
  plan.checkpoint_every =
      std::max<std::uint64_t>(1, flag("--checkpoint-every", [&] { return parse_count(opt.checkpoint_every); }));
  plan.checkpoint_dir = opt.checkpoint;
  if (plan.shards == 0) throw Error(ErrorCode::InvalidArgument, "--shards: must be positive");
  const std::uint64_t stop = opt.stop_after.empty() ? 0 : flag("--stop-after", [&] { return parse_count(opt.stop_after); });
  if (stop != 0 && plan.checkpoint_dir.empty())
    throw Error(ErrorCode::InvalidArgument, "--stop-after: needs --checkpoint");
  const std::size_t streams = plan.config["streams"].get<std::size_t>();
  return run_lil(plan, std::vector<limit_stats::LilStreamState>(streams), std::vector<std::string>(streams), stop, opt,
                 run);
}

int cmd_resume(Options opt, bool workers_given, bool shards_given) {
  if (opt.checkpoint.empty()) throw Error(ErrorCode::InvalidArgument, "--checkpoint: required");
  const fs::path path = fs::path(opt.checkpoint) / kCheckpointFile;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "--checkpoint: cannot read " + path.string());
  std::string header;
  std::getline(in, header);
  std::ostringstream rest;
  rest << in.rdbuf();
  const std::string body_text = rest.str();
  char digest[17] = {};
  if (std::sscanf(header.c_str(), "fnv1a64 %16s", digest) != 1)
    throw Error(ErrorCode::CorruptCheckpoint, "missing checkpoint header");
  char expected[17];
  std::snprintf(expected, sizeof expected, "%016llx", static_cast<unsigned long long>(fnv1a(body_text)));
  if (std::string(digest) != expected || header.size() != 24)
    throw Error(ErrorCode::CorruptCheckpoint, "content hash does not match");
  ordered_json body;
  try {
    body = ordered_json::parse(body_text);
  } catch (const std::exception& e) {
    throw Error(ErrorCode::CorruptCheckpoint, e.what());
  }
  if (body.value("format", "") != kCheckpointFormat || body.value("version", "") != SUPERDIFF_VERSION)
    throw Error(ErrorCode::VersionMismatch, "checkpoint written by " + body.value("version", std::string("?")) +
                                                ", this is " + SUPERDIFF_VERSION);
  LilPlan plan;
  plan.config = body.at("config");
  plan.seed = body.at("seed").get<std::uint64_t>();
  plan.shards = body.at("shards").get<std::size_t>();
  plan.workers = body.at("workers").get<std::size_t>();
  plan.out = body.at("out").get<std::string>();
  plan.checkpoint_every = body.at("checkpoint_every").get<std::uint64_t>();
  plan.checkpoint_dir = opt.checkpoint;
  if ((workers_given && opt.workers != plan.workers) || (shards_given && opt.shards != plan.shards))
    throw Error(ErrorCode::LayoutMismatch, "checkpoint was written with workers=" + std::to_string(plan.workers) +
                                               " shards=" + std::to_string(plan.shards));
  std::vector<limit_stats::LilStreamState> states;
  std::vector<std::string> errors;
  for (const auto& s : body.at("streams")) {
    errors.emplace_back();
    states.push_back(state_from_json(s, errors.back()));
  }
  if (states.size() != plan.config.at("streams").get<std::size_t>())
    throw Error(ErrorCode::CorruptCheckpoint, "stream count does not match the plan");

  opt.seed = plan.seed;
  opt.shards = plan.shards;
  opt.workers = plan.workers;
  if (opt.out == ".") opt.out = plan.out;
  Run run("lil", opt);
  const std::uint64_t stop = opt.stop_after.empty() ? 0 : flag("--stop-after", [&] { return parse_count(opt.stop_after); });
  return run_lil(plan, std::move(states), std::move(errors), stop, opt, run);
}

void cmd_mixing(const Options& opt, Run& run) {
  const auto src = source_config(opt, "lorentz");
  const auto spec = make_source(src, opt.seed);
  const auto q = flag("--q-grid", [&] { return parse_count_grid(opt.q_grid); });
  const std::uint64_t length = flag("--length", [&] { return parse_count(opt.length); });
  if (!(opt.R >= 8)) throw Error(ErrorCode::InvalidArgument, "--R: must be at least 8");
  if (*std::max_element(q.begin(), q.end()) > 1000) throw Error(ErrorCode::InvalidArgument, "--q-grid: q above 1000");
  const auto probe = probe_config(opt, kTagMixing);
  run.config() = {{"source", src}, {"R", opt.R}, {"q_grid", q}, {"past", opt.past}, {"length_per_shard", length}};
  const auto m = limit_stats::mixing_decay(spec, opt.R, q, opt.past, length, probe);
  run.write("mixing.json", limit_stats::to_json(m));
  for (const auto& p : m.points) {
    if (p.q != 0) continue;
    double expected = NAN;
    if (spec.kind == sources::SourceKind::Pareto)
      expected = spec.dimension * limit_stats::iid_truncated_second_moment(opt.R, spec.scale);
    if (!std::isnan(expected)) run.gate("q0_autocov_z", std::abs(p.autocov - expected) / p.autocov_se, 0, 3);
  }
}

void cmd_oracle_suite(const Options& opt, Run& run) {
  oracle::SuiteConfig config;
  config.oracle.scale = opt.scale;
  config.oracle.seed = opt.seed;
  config.cov_m = flag("--cov-m", [&] { return parse_count(opt.cov_m); });
  config.clt_n = flag("--clt-n", [&] { return parse_count(opt.clt_n); });
  config.clt_samples = opt.clt_samples;
  config.draws = flag("--draws", [&] { return parse_count(opt.draws); });
  config.probe = probe_config(opt, kTagOracle);
  run.config() = {{"scale", config.oracle.scale},
                  {"cov_m", config.cov_m},
                  {"cov_R", config.cov_R},
                  {"moment_m", config.moment_m},
                  {"r_exponent", config.r_exponent},
                  {"clt_n", config.clt_n},
                  {"clt_samples", config.clt_samples},
                  {"draws", config.draws},
                  {"blocks_per_shard", opt.blocks_per_shard}};
  const auto report = oracle::oracle_suite(config);
  run.write("oracle_suite.json", oracle::to_json(report));
  for (const auto& c : report.checks) {
    if (c.se > 0)
      run.gate(c.name + "_z", c.z, 0, c.threshold);
    else
      run.gate(c.name, c.pass, 1, 1);
  }
}

// Small instances of every experiment, written with the documented schemas
// for the figure renderer.
void cmd_report_data(Options opt, Run& run) {
  ordered_json config;
  cmd_normalizers(opt, run);
  config["normalizers"] = run.config();
  cmd_series(opt, run);
  config["series"] = run.config();
  cmd_blocks(opt, run);
  config["blocks"] = run.config();
  opt.nmax = opt.nmax.empty() ? "2^18" : opt.nmax;
  opt.source = "lorentz";
  cmd_tails(opt, run);
  config["tails"] = run.config();
  opt.source = "pareto";
  opt.n = "2^10";
  opt.samples = 2000;
  cmd_clt(opt, run);
  config["clt"] = run.config();
  opt.m_grid = "2^8..2^10";
  opt.blocks_per_shard = 50;
  cmd_moments(opt, run);
  config["moments"] = run.config();
  run.config() = config;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  std::vector<char*> argv;
  std::vector<std::string> copy = args;
  copy.insert(copy.begin(), "superdiff");
  for (auto& a : copy) argv.push_back(a.data());
  return run(static_cast<int>(argv.size()), argv.data());
}

int run(int argc, char** argv) {
  CLI::App app{"Lorentz gas superdiffusion experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", SUPERDIFF_VERSION);
  Options opt;
  std::string seed_text;

  auto common = [&](CLI::App* c) {
    c->add_option("--seed", opt.seed, "master seed");
    c->add_option("--workers", opt.workers, "threads (default SUPERDIFF_WORKERS or all cores)");
    c->add_option("--shards", opt.shards, "shard count; fixes the work split and the output");
    c->add_option("--out", opt.out, "output directory");
    c->add_flag("--verify", opt.verify, "turn acceptance thresholds into the exit code");
  };
  auto source = [&](CLI::App* c) {
    c->add_option("--source", opt.source, "lorentz | pareto (oracle) | gaussian");
    c->add_option("--table", opt.table, "table config JSON");
    c->add_option("--radius", opt.radius, "radius of the default single-disc table");
    c->add_option("--observable", opt.observable, "kappa | phi");
    c->add_option("--scale", opt.scale, "oracle or Gaussian scale");
    c->add_option("--dim", opt.dim, "oracle or Gaussian dimension");
  };

  auto* simulate = app.add_subcommand("simulate", "trajectory sums at dyadic checkpoints");
  common(simulate);
  source(simulate);
  simulate->add_option("--nmax", opt.nmax, "collisions per stream (2^k accepted)");
  simulate->add_option("--streams", opt.streams, "trajectories");

  auto* corr = app.add_subcommand("corridors", "enumerate corridors");
  common(corr);
  corr->add_option("--table", opt.table, "table config JSON");
  corr->add_option("--radius", opt.radius, "radius of the default single-disc table");
  corr->add_option("--max-norm", opt.max_norm, "largest |xi|_inf");

  auto* tails_cmd = app.add_subcommand("tails", "tail fit of the cell-change vector");
  common(tails_cmd);
  source(tails_cmd);
  tails_cmd->add_option("--nmax", opt.nmax, "collisions");

  auto* norm_cmd = app.add_subcommand("normalizers", "normalizer sequences at dyadic n");
  common(norm_cmd);
  norm_cmd->add_option("--C", opt.C);
  norm_cmd->add_option("--C0", opt.C0);
  norm_cmd->add_option("--ell1", opt.ell1, "cnlg | const:v | ll^b");
  norm_cmd->add_option("--varsigma", opt.varsigma);
  norm_cmd->add_option("--dim", opt.dim);
  norm_cmd->add_option("--max-exp", opt.max_exp, "last dyadic exponent");

  auto* series_cmd = app.add_subcommand("series", "series criterion, HL0 checks and the appendix integral");
  common(series_cmd);
  series_cmd->add_option("--C", opt.C);
  series_cmd->add_option("--a-coef", opt.a_coef, "A(t) = a_coef L(t) |Sigma|^2");
  series_cmd->add_option("--alphas", opt.alphas);
  series_cmd->add_option("--bisect", opt.bisect);
  series_cmd->add_option("--ell1", opt.ell1);

  auto* blocks = app.add_subcommand("blocks", "block decomposition of [2^n, 2^(n+1))");
  common(blocks);
  blocks->add_option("--n", opt.n_range, "level or range a..b");

  auto* mom = app.add_subcommand("moments", "fourth moments and truncated covariances");
  common(mom);
  source(mom);
  mom->add_option("--m-grid", opt.m_grid);
  mom->add_option("--r-rule", opt.r_rule);
  mom->add_option("--blocks-per-shard", opt.blocks_per_shard);
  mom->add_option("--R-grid", opt.R_grid, "also write truncated covariances for these R");
  mom->add_option("--cov-m", opt.cov_m);

  auto* clt = app.add_subcommand("clt", "nonstandard CLT experiment");
  common(clt);
  source(clt);
  clt->add_option("--n", opt.n);
  clt->add_option("--samples", opt.samples);
  clt->add_option("--C", opt.C_list, "tail constant per component");
  clt->add_option("--tail-collisions", opt.tail_collisions, "collisions for the tail fit (lorentz)");

  auto* lil = app.add_subcommand("lil", "running records against the LIL normalizer");
  common(lil);
  source(lil);
  lil->add_option("--nmax", opt.nmax);
  lil->add_option("--streams", opt.streams);
  lil->add_option("--normalizer", opt.normalizer, "cstar | classical");
  auto* lil_C = lil->add_option("--C", opt.C);
  lil->add_option("--lambda", opt.lambda);
  lil->add_option("--burn-in", opt.burn_in);
  lil->add_option("--checkpoint", opt.checkpoint, "checkpoint directory");
  lil->add_option("--checkpoint-every", opt.checkpoint_every);
  lil->add_option("--stop-after", opt.stop_after, "stop once every stream reached this step");

  auto* mixing = app.add_subcommand("mixing", "correlation decay of truncated values");
  common(mixing);
  source(mixing);
  mixing->add_option("--R", opt.R);
  mixing->add_option("--q-grid", opt.q_grid);
  mixing->add_option("--past", opt.past);
  mixing->add_option("--length", opt.length, "values per shard");

  auto* oracle_cmd = app.add_subcommand("oracle-suite", "closed-form checks on the i.i.d. oracle");
  common(oracle_cmd);
  oracle_cmd->add_option("--scale", opt.scale);
  oracle_cmd->add_option("--cov-m", opt.cov_m);
  oracle_cmd->add_option("--clt-n", opt.clt_n);
  oracle_cmd->add_option("--clt-samples", opt.clt_samples);
  oracle_cmd->add_option("--draws", opt.draws);
  oracle_cmd->add_option("--blocks-per-shard", opt.blocks_per_shard);

  auto* report = app.add_subcommand("report-data", "inputs for the figure renderer");
  common(report);
  report->add_option("--nmax", opt.nmax, "collisions for the tail fit");

  auto* resume = app.add_subcommand("resume", "continue an interrupted lil run");
  auto* resume_workers = resume->add_option("--workers", opt.workers);
  auto* resume_shards = resume->add_option("--shards", opt.shards);
  resume->add_option("--checkpoint", opt.checkpoint)->required();
  resume->add_option("--out", opt.out);
  resume->add_option("--stop-after", opt.stop_after);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    opt.C_given = lil_C->count() > 0;
    if (resume->parsed()) return cmd_resume(opt, resume_workers->count() > 0, resume_shards->count() > 0);
    CLI::App* sub = app.get_subcommands().front();
    Run run(sub->get_name(), opt);
    if (sub == simulate) cmd_simulate(opt, run);
    else if (sub == corr) cmd_corridors(opt, run);
    else if (sub == tails_cmd) cmd_tails(opt, run);
    else if (sub == norm_cmd) cmd_normalizers(opt, run);
    else if (sub == series_cmd) cmd_series(opt, run);
    else if (sub == blocks) cmd_blocks(opt, run);
    else if (sub == mom) cmd_moments(opt, run);
    else if (sub == clt) cmd_clt(opt, run);
    else if (sub == lil) return cmd_lil(opt, run);
    else if (sub == mixing) cmd_mixing(opt, run);
    else if (sub == oracle_cmd) cmd_oracle_suite(opt, run);
    else if (sub == report) cmd_report_data(opt, run);
    return run.finish();
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return is_validation_error(e.code()) ? kExitValidation : kExitRuntime;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
}

}  // namespace superdiff::cli
