// Command-line surface tying the library together: presets, counting runs,
// bound reports, separation tables, overlap scans, sphere orbits.
// Exit codes: 0 success, 2 domain error, 3 resource limit, 64 usage.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fraclab/algebraic.hpp"
#include "fraclab/boxcount.hpp"
#include "fraclab/dim_bounds.hpp"
#include "fraclab/errors.hpp"
#include "fraclab/exact.hpp"
#include "fraclab/ifs.hpp"
#include "fraclab/overlap.hpp"
#include "fraclab/polynomial.hpp"
#include "fraclab/separation.hpp"
#include "fraclab/sphere.hpp"
#include "fraclab/version.hpp"

namespace {

using namespace fraclab;
using nlohmann::json;

using ull = unsigned long long;

// ---- file helpers -----------------------------------------------------------

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write " + path);
  out << text;
}

// Output paths are probed before any compute starts.  The probe never
// clobbers existing content and leaves nothing behind when the file did not
// exist.
void check_writable(const std::string& path) {
  if (path.empty()) return;
  std::error_code ec;
  bool existed = std::filesystem::exists(path, ec);
  std::ofstream f(path, std::ios::app);
  bool ok = f.good();
  f.close();
  if (!existed && ok) std::filesystem::remove(path, ec);
  if (!ok) throw DomainError("output path is not writable: " + path);
}

const char* or_dash(const std::string& s) { return s.empty() ? "-" : s.c_str(); }

// ---- flag parsing -----------------------------------------------------------

std::pair<int, int> parse_range(const std::string& text, const char* flag) {
  int lo = 0, hi = 0;
  char extra = 0;
  if (std::sscanf(text.c_str(), "%d:%d%c", &lo, &hi, &extra) != 2)
    throw DomainError(std::string(flag) + " expects lo:hi");
  if (lo > hi) throw DomainError(std::string(flag) + " range is reversed");
  return {lo, hi};
}

Vec parse_coords(const std::string& text) {
  Vec out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t pos = 0;
      double v = std::stod(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::exception&) {
      throw DomainError("coordinates expect comma-separated numbers");
    }
  }
  if (out.empty()) throw DomainError("coordinates expect comma-separated numbers");
  return out;
}

// Contraction given as a decimal or through the reciprocal's polynomial; the
// polynomial form carries the exact field.
struct LambdaSpec {
  double value = 0.0;
  FieldPtr field;
  bool given = false;
  bool exact() const { return static_cast<bool>(field); }
};

LambdaSpec resolve_lambda(double decimal, const std::string& poly_text) {
  LambdaSpec out;
  if (!poly_text.empty()) {
    IntPolynomial poly = IntPolynomial::parse(poly_text);
    AlgebraicNumber theta = AlgebraicNumber::largest_real_root(poly);
    double th = theta.real_value();
    if (th <= 1.0) throw DomainError("largest real root must exceed 1");
    out.value = 1.0 / th;
    out.field = make_field(poly);
    out.given = true;
    if (decimal != 0.0 && std::abs(decimal - out.value) > 1e-9)
      throw DomainError("--lambda and --lambda-poly disagree");
    return out;
  }
  if (decimal != 0.0) {
    if (!(decimal > 0.0 && decimal < 1.0))
      throw DomainError("lambda must lie in (0,1)");
    out.value = decimal;
    out.given = true;
  }
  return out;
}

void float_mode_warning() {
  std::fprintf(stderr,
               "warning: decimal input, floating-point mode; coincidences are "
               "tolerance-based, not certified\n");
}

// ---- system selection -------------------------------------------------------

struct SystemFlags {
  std::string preset;
  std::string config;
  double lambda = 0.0;
  std::string lambda_poly;
  double epsilon = 0.05;
  double c = 0.95;
  LambdaSpec lam;  // resolved at run time
};

void add_system_flags(CLI::App* cmd, SystemFlags& f) {
  cmd->add_option("--preset", f.preset,
                  "bernoulli_comb | extended_comb | sphere | affine_companion");
  cmd->add_option("--config", f.config, "JSON system description");
  cmd->add_option("--lambda", f.lambda, "contraction as a decimal (float mode)");
  cmd->add_option("--lambda-poly", f.lambda_poly,
                  "polynomial of the reciprocal, e.g. \"x^2-2\" (exact mode)");
  cmd->add_option("--epsilon", f.epsilon, "third-map scale for extended_comb");
  cmd->add_option("--c", f.c, "contraction for the sphere preset");
}

std::string system_label(const SystemFlags& f) {
  if (!f.config.empty()) return "config:" + f.config;
  return f.preset.empty() ? "(unset)" : f.preset;
}

bool wants_affine(const SystemFlags& f) { return f.preset == "affine_companion"; }

void require_lambda(const SystemFlags& f) {
  if (!f.lam.given)
    throw DomainError("preset " + f.preset + " needs --lambda or --lambda-poly");
}

IfsSystem build_system(const SystemFlags& f) {
  if (!f.config.empty()) {
    if (!f.preset.empty()) throw DomainError("--preset conflicts with --config");
    return system_from_json_text(read_file(f.config));
  }
  if (f.preset == "bernoulli_comb") {
    require_lambda(f);
    return bernoulli_comb(f.lam.value);
  }
  if (f.preset == "extended_comb") {
    require_lambda(f);
    return extended_comb(f.lam.value, f.epsilon);
  }
  if (f.preset == "sphere") return sphere_system(f.c);
  if (f.preset == "affine_companion")
    throw DomainError(
        "affine_companion is a two-scale affine system; only render and boxdim "
        "handle it");
  throw DomainError("pick a system with --preset or --config");
}

// ---- classify ---------------------------------------------------------------

struct ClassifyOpts {
  std::string poly;
  double lambda = 0.0;
  bool dry = false;
};

void run_classify(const ClassifyOpts& o) {
  if (!o.poly.empty()) {
    IntPolynomial p = IntPolynomial::parse(o.poly);
    if (o.dry) {
      std::printf("dry-run: classify the reciprocal of the largest real root of %s\n",
                  p.to_string().c_str());
      return;
    }
    ClassifyResult res = classify_lambda(AlgebraicNumber::largest_real_root(p));
    std::printf("%s lambda≈%.5f\n", to_string(res.kind), res.lambda);
    return;
  }
  if (o.dry) {
    std::printf("dry-run: classify lambda=%g (no algebraic data)\n", o.lambda);
    return;
  }
  ClassifyResult res = classify_lambda(o.lambda);
  std::printf("%s lambda≈%.5f\n", to_string(res.kind), res.lambda);
}

// ---- render -----------------------------------------------------------------

struct RenderOpts {
  SystemFlags sys;
  int m = 9;
  double delta = 0.0;  // 0 means 2^-m
  std::string out;
  std::uint64_t max_words = 200'000'000ULL;
  bool dry = false;
};

void run_render(RenderOpts& o) {
  o.sys.lam = resolve_lambda(o.sys.lambda, o.sys.lambda_poly);
  double delta = o.delta > 0.0 ? o.delta : std::exp2(-o.m);
  check_writable(o.out);
  EnumBudget budget;
  budget.max_words = o.max_words;
  PointCloud cloud{0};
  if (wants_affine(o.sys)) {
    require_lambda(o.sys);
    DiagAffineSystem sys = affine_companion(o.sys.lam.value);
    if (o.dry) {
      std::printf("dry-run: render %s delta=%g m=%d svg=%s\n", sys.name().c_str(),
                  delta, o.m, o.out.c_str());
      return;
    }
    cloud = attractor_cloud(sys, delta, budget);
  } else {
    IfsSystem sys = build_system(o.sys);
    if (o.dry) {
      std::printf("dry-run: render %s delta=%g m=%d svg=%s\n", sys.name().c_str(),
                  delta, o.m, o.out.c_str());
      return;
    }
    cloud = orbital_cloud(sys, delta, budget);
  }
  write_svg(cloud, o.m, o.out);
  std::printf("svg=%s points=%llu m=%d\n", o.out.c_str(),
              static_cast<ull>(cloud.size()), o.m);
}

// ---- boxdim -----------------------------------------------------------------

struct BoxdimOpts {
  SystemFlags sys;
  std::string m_range;
  std::string window;
  std::string csv;
  bool fixed_cloud = false;
  bool allow_partial = false;
  double rate_limit = 0.0;
  bool rate_given = false;
  std::uint64_t max_words = 200'000'000ULL;
  bool dry = false;
};

void run_boxdim(BoxdimOpts& o, unsigned threads) {
  o.sys.lam = resolve_lambda(o.sys.lambda, o.sys.lambda_poly);
  auto [lo, hi] = parse_range(o.m_range, "--m");
  if (lo < 1 || hi > 30) throw DomainError("mesh exponents must lie in [1,30]");
  int wlo = lo, whi = hi;
  if (!o.window.empty()) {
    std::tie(wlo, whi) = parse_range(o.window, "--window");
    if (wlo < lo || whi > hi)
      throw DomainError("fit window must lie inside the mesh range");
  }
  check_writable(o.csv);
  EnumBudget budget;
  budget.max_words = o.max_words;
  budget.allow_partial = o.allow_partial;
  const char* mode = o.fixed_cloud ? "fixed-cloud" : "per-scale";

  CountCurve curve;
  if (wants_affine(o.sys)) {
    require_lambda(o.sys);
    DiagAffineSystem sys = affine_companion(o.sys.lam.value);
    if (o.dry) {
      std::printf("dry-run: boxdim %s m=[%d,%d] window=[%d,%d] mode=%s csv=%s\n",
                  sys.name().c_str(), lo, hi, wlo, whi, mode, or_dash(o.csv));
      return;
    }
    if (o.fixed_cloud) {
      PointCloud cloud = attractor_cloud(sys, std::exp2(-hi), budget);
      curve = count_curve(cloud, lo, hi, threads);
      curve.truncated = cloud.truncated;
    } else {
      curve = count_curve(sys, lo, hi, budget);
    }
  } else {
    IfsSystem sys = build_system(o.sys);
    if (o.dry) {
      std::printf("dry-run: boxdim %s m=[%d,%d] window=[%d,%d] mode=%s csv=%s\n",
                  sys.name().c_str(), lo, hi, wlo, whi, mode, or_dash(o.csv));
      return;
    }
    if (o.fixed_cloud) {
      PointCloud cloud = orbital_cloud(sys, std::exp2(-hi), budget);
      curve = count_curve(cloud, lo, hi, threads);
      curve.truncated = cloud.truncated;
    } else {
      curve = count_curve(sys, lo, hi, budget);
    }
  }
  if (curve.truncated && !o.allow_partial)
    throw ResourceError("counting budget exhausted; raise --max-words or pass --allow-partial");
  if (!o.csv.empty()) write_csv(curve, o.csv);
  DimensionEstimate est = estimate_dimension(curve, wlo, whi);
  std::printf("dim_est≈%.4f\n", est.slope);
  if (o.rate_given) {
    RateFit rf = fit_rate(curve, o.rate_limit);
    std::printf("rate_c≈%.4f max_dev≈%.4f\n", rf.c_rate, rf.max_dev);
  }
  if (curve.truncated)
    std::fprintf(stderr, "warning: curve truncated by the word budget\n");
}

// ---- bounds -----------------------------------------------------------------

struct BoundsOpts {
  double s = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  int d = 0;
  bool s_given = false;
  bool d_given = false;
  std::string config;
  std::string json_out;
  double alpha_r_scale = 0.0;
  bool alpha_r_given = false;
  int gamma_kmax = 8;
  bool gamma_given = false;
  bool dry = false;
};

void run_bounds(BoundsOpts& o) {
  std::optional<IfsSystem> sys;
  if (!o.config.empty()) sys.emplace(system_from_json_text(read_file(o.config)));

  BoundInputs inp;
  if (o.s_given) {
    inp.s = o.s;
  } else if (sys) {
    std::vector<double> ratios;
    for (const auto& map : sys->maps()) ratios.push_back(map.scale);
    inp.s = similarity_dimension(ratios);
  } else {
    throw DomainError("bounds needs --s (or --config to derive it)");
  }
  inp.alpha = o.alpha;
  inp.beta = o.beta;
  inp.gamma = o.gamma;
  if (o.d_given)
    inp.d = o.d;
  else if (sys)
    inp.d = static_cast<int>(sys->dim());
  else
    throw DomainError("bounds needs --d (or --config to derive it)");
  validate(inp);
  check_writable(o.json_out);
  if (o.dry) {
    std::printf("dry-run: bounds s=%g alpha=%g beta=%g gamma=%g d=%d json=%s\n",
                inp.s, inp.alpha, inp.beta, inp.gamma, inp.d, or_dash(o.json_out));
    return;
  }
  MaxMinResult r = thm1_bound(inp);
  std::printf("thm1_bound=%g x*=%g\n", r.value, r.argmax_x);
  if (!o.json_out.empty()) write_text(o.json_out, bounds_report_json(inp));
  if (o.alpha_r_given) {
    if (!sys) throw DomainError("--alpha-r needs --config");
    std::printf("alpha_r≈%.6f r=%g\n", alpha_r(*sys, o.alpha_r_scale),
                o.alpha_r_scale);
  }
  if (o.gamma_given) {
    if (!sys) throw DomainError("--estimate-gamma needs --config");
    GammaEstimate ge = gamma_estimate(*sys, o.gamma_kmax);
    std::printf("gamma_hat≈%.4f fit=%s\n", ge.gamma_hat,
                ge.fit_valid ? "ok" : "insufficient");
  }
}

// ---- separation -------------------------------------------------------------

struct SepOpts {
  double lambda = 0.0;
  std::string lambda_poly;
  int n_max = 14;
  double kappa = 1.0;
  double s_thr = 0.0;
  bool s_given = false;
  std::string csv;
  bool dry = false;
};

void run_separation(SepOpts& o) {
  LambdaSpec lam = resolve_lambda(o.lambda, o.lambda_poly);
  if (!lam.given) throw DomainError("separation needs --lambda or --lambda-poly");
  if (!lam.exact()) float_mode_warning();
  check_writable(o.csv);
  if (o.dry) {
    std::printf("dry-run: separation lambda≈%.6f n_max=%d kappa=%g mode=%s csv=%s\n",
                lam.value, o.n_max, o.kappa, lam.exact() ? "exact+float" : "float",
                or_dash(o.csv));
    return;
  }
  auto table = separation_table(lam.value, o.n_max, o.kappa);
  if (!o.csv.empty()) write_text(o.csv, table_csv(table));
  int passes = 0;
  double min_scaled = std::numeric_limits<double>::infinity();
  for (const auto& e : table) {
    passes += e.pass ? 1 : 0;
    min_scaled = std::min(min_scaled, e.scaled_gap);
  }
  std::printf("lambda≈%.6f n_max=%d pass=%d/%d min_scaled_gap=%.6g\n", lam.value,
              o.n_max, passes, o.n_max, min_scaled);
  if (lam.exact()) {
    int exact_cap = std::min(o.n_max, 20);
    bool found = false;
    for (int n = 1; n <= exact_cap && !found; ++n) {
      GapReport g = gap_report_exact(lam.field, n);
      if (g.zero_gap) {
        std::printf("exact_collision=%s~%s n=%d\n",
                    word_bits_to_string(g.word_a, n).c_str(),
                    word_bits_to_string(g.word_b, n).c_str(), n);
        found = true;
      }
    }
    if (!found) std::printf("exact_collision=none n<=%d\n", exact_cap);
  }
  if (o.s_given)
    std::printf("r2=%llu t=%llu s=%g n=%d\n",
                static_cast<ull>(r2_count(o.s_thr, lam.value, o.n_max)),
                static_cast<ull>(t_count(o.s_thr, lam.value, o.n_max)), o.s_thr,
                o.n_max);
}

// ---- overlaps ---------------------------------------------------------------

struct OverlapOpts {
  SystemFlags sys;
  int max_len = 6;
  double tol = 1e-9;
  std::string json_out;
  double reduced_r = 0.0;
  bool reduced_given = false;
  bool dry = false;
};

// Exact mode runs on the comb over Q(lambda); anything else falls back to the
// float search on the composed maps.
bool exact_requested(const SystemFlags& f) {
  if (!f.config.empty() || !f.lam.exact()) return false;
  if (f.preset != "bernoulli_comb")
    throw DomainError(
        "exact mode covers the bernoulli_comb preset; use --lambda for float mode");
  return true;
}

void run_overlaps(OverlapOpts& o) {
  o.sys.lam = resolve_lambda(o.sys.lambda, o.sys.lambda_poly);
  check_writable(o.json_out);
  bool exact = exact_requested(o.sys);
  if (o.dry) {
    std::printf("dry-run: overlaps %s max_len=%d mode=%s tol=%g json=%s\n",
                system_label(o.sys).c_str(), o.max_len, exact ? "exact" : "float",
                exact ? 0.0 : o.tol, or_dash(o.json_out));
    return;
  }
  OverlapReport rep;
  std::optional<ExactSystem> es;
  std::optional<IfsSystem> fs;
  if (exact) {
    es.emplace(exact_comb(o.sys.lam.field));
    rep = exact_overlaps(*es, o.max_len);
  } else {
    float_mode_warning();
    fs.emplace(build_system(o.sys));
    rep = exact_overlaps(*fs, o.max_len, o.tol);
  }
  if (!o.json_out.empty()) write_text(o.json_out, overlap_report_json(rep));
  std::printf("mode=%s pairs=%zu max_len=%d\n", exact ? "exact" : "float",
              rep.pairs.size(), o.max_len);
  if (!rep.pairs.empty())
    std::printf("first=%s~%s\n", word_to_string(rep.pairs.front().word_a).c_str(),
                word_to_string(rep.pairs.front().word_b).c_str());
  if (o.reduced_given) {
    std::vector<Word> red =
        exact ? reduced_words(*es, o.reduced_r) : reduced_words(*fs, o.reduced_r);
    std::printf("reduced=%zu r=%g\n", red.size(), o.reduced_r);
  }
}

// ---- wsp --------------------------------------------------------------------

struct WspOpts {
  SystemFlags sys;
  int max_len = 6;
  double tol = 1e-9;
  std::string csv;
  bool dry = false;
};

void run_wsp(WspOpts& o) {
  o.sys.lam = resolve_lambda(o.sys.lambda, o.sys.lambda_poly);
  check_writable(o.csv);
  bool exact = exact_requested(o.sys);
  if (o.dry) {
    std::printf("dry-run: wsp %s max_len=%d mode=%s csv=%s\n",
                system_label(o.sys).c_str(), o.max_len, exact ? "exact" : "float",
                or_dash(o.csv));
    return;
  }
  WspMargin margin;
  if (exact) {
    margin = wsp_margin(exact_comb(o.sys.lam.field), o.max_len);
  } else {
    float_mode_warning();
    margin = wsp_margin(build_system(o.sys), o.max_len, o.tol);
  }
  if (!o.csv.empty()) write_text(o.csv, margin_csv(margin));
  std::printf("wsp_margin=%.6g any_pair=%s mode=%s max_len=%d\n", margin.overall,
              margin.any_pair ? "yes" : "no", exact ? "exact" : "float", o.max_len);
  if (margin.any_pair && margin.overall > 0.0)
    std::printf(
        "note: margins stay bounded away from zero up to this length; heuristic "
        "evidence of weak separation, not a certificate\n");
}

// ---- sphere -----------------------------------------------------------------

struct SphereOpts {
  std::string config;
  std::string x_text = "1,0,0";
  bool x_given = false;
  int n_max = 8;
  int m = 6;
  bool commuting = false;
  bool sg = false;
  double c = 0.95;
  int sg_m = 7;
  std::uint64_t max_words = 50'000'000ULL;
  std::string csv;
  std::string svg;
  bool dry = false;
};

Mat mat_from_json(const json& j) {
  std::size_t d = j.size();
  if (!j.is_array() || d == 0) throw DomainError("config: expected a matrix");
  Mat m(d);
  for (std::size_t i = 0; i < d; ++i) {
    const json& row = j.at(i);
    if (!row.is_array() || row.size() != d)
      throw DomainError("config: matrix must be square");
    for (std::size_t k = 0; k < d; ++k) m(i, k) = row.at(k).get<double>();
  }
  return m;
}

Mat generator_from_json(const json& j) {
  if (j.is_array()) return mat_from_json(j);
  if (j.is_object() && j.contains("axis")) {
    Vec axis;
    for (const auto& v : j.at("axis")) axis.push_back(v.get<double>());
    double angle = 0.0;
    if (j.contains("angle_deg"))
      angle = j.at("angle_deg").get<double>() * 3.14159265358979323846 / 180.0;
    else if (j.contains("angle_rad"))
      angle = j.at("angle_rad").get<double>();
    else
      throw DomainError("config: axis-angle generator needs angle_deg or angle_rad");
    return rotation_about_axis(axis, angle);
  }
  throw DomainError("config: generator must be a matrix or an axis-angle object");
}

// Flat sphere config: {"generators": [...], "include_inverses": bool,
// "x0": [...], "c": number}.  x0/c apply only where the flags were left at
// their defaults.
RotationSet sphere_rotations(const SphereOpts& o, Vec* x, double* c) {
  if (!o.config.empty()) {
    try {
      json root = json::parse(read_file(o.config));
      std::vector<Mat> gens;
      for (const auto& g : root.at("generators"))
        gens.push_back(generator_from_json(g));
      RotationSet rot =
          make_rotation_set(std::move(gens), root.value("include_inverses", true));
      if (root.contains("x0") && !o.x_given) {
        x->clear();
        for (const auto& v : root.at("x0")) x->push_back(v.get<double>());
      }
      if (root.contains("c")) *c = root.at("c").get<double>();
      return rot;
    } catch (const json::exception& e) {
      throw DomainError(std::string("config: ") + e.what());
    }
  }
  if (o.commuting) return commuting_rotation_set();
  return default_rotation_set();
}

void run_sphere(SphereOpts& o) {
  if (!o.config.empty() && o.commuting)
    throw DomainError("--config conflicts with --commuting");
  Vec x = parse_coords(o.x_text);
  double c = o.c;
  RotationSet rot = sphere_rotations(o, &x, &c);
  const char* gens = !o.config.empty() ? o.config.c_str()
                     : o.commuting     ? "commuting"
                                       : "default";
  check_writable(o.csv);
  check_writable(o.svg);
  if (o.sg) {
    if (o.dry) {
      std::printf("dry-run: sphere sg c=%g m=%d generators=%s csv=%s svg=%s\n", c,
                  o.sg_m, gens, or_dash(o.csv), or_dash(o.svg));
      return;
    }
    EnumBudget budget;
    budget.max_words = o.max_words;
    SgResult sg = sg_attractor(c, rot, x, o.sg_m, budget);
    if (!o.csv.empty()) write_csv(sg.curve, o.csv);
    if (!o.svg.empty()) write_svg(sg.cloud, o.sg_m, o.svg);
    std::printf("sg_dim_est≈%.4f target_dim≈%.4f eps_hat≈%.4f depth=%d shells=%d\n",
                sg.estimate.slope, sg.target_dim, sg.eps_hat, sg.depth, sg.shells);
    return;
  }
  if (o.dry) {
    std::printf("dry-run: sphere orbit n_max=%d m=%d generators=%s csv=%s svg=%s\n",
                o.n_max, o.m, gens, or_dash(o.csv), or_dash(o.svg));
    return;
  }
  OrbitCounts counts = orbit_counts(rot, x, o.n_max, o.m, o.max_words);
  if (!o.csv.empty()) write_text(o.csv, orbit_csv(counts));
  if (!o.svg.empty()) write_svg(orbit(rot, x, o.n_max, o.max_words), o.m, o.svg);
  std::printf("eps_hat≈%.4f onset=%d saturated=%s n_max=%d m=%d\n", counts.eps_hat,
              counts.saturation_onset, counts.saturated ? "yes" : "no", o.n_max,
              o.m);
}

// ---- scan -------------------------------------------------------------------

struct ScanOpts {
  double lo = 0.5;
  double hi = 0.668;
  int samples = 20;
  int n_max = 14;
  std::uint64_t seed = 0xF1D0;
  int dim_samples = 0;
  std::string dim_window = "8:13";
  std::string csv;
  bool dry = false;
};

void run_scan(ScanOpts& o) {
  auto [dlo, dhi] = parse_range(o.dim_window, "--dim-window");
  check_writable(o.csv);
  if (o.dry) {
    std::printf(
        "dry-run: scan lambda in [%g,%g] samples=%d n_max=%d seed=%llu "
        "dim_samples=%d csv=%s\n",
        o.lo, o.hi, o.samples, o.n_max, static_cast<ull>(o.seed), o.dim_samples,
        or_dash(o.csv));
    return;
  }
  ScanReport rep =
      monte_carlo_scan(o.lo, o.hi, o.samples, o.n_max, o.seed, o.dim_samples, dlo, dhi);
  if (!o.csv.empty()) write_text(o.csv, scan_csv(rep));
  int full = 0;
  std::vector<double> errs;
  for (const ScanRow& row : rep.rows) {
    bool all = true;
    for (const auto& e : row.per_n)
      if (e.n >= 6 && !e.pass) all = false;
    full += all ? 1 : 0;
    if (row.has_dim) errs.push_back(std::abs(row.dim_est - row.target_dim));
  }
  std::printf("samples=%d seed=%llu full_pass=%d/%d", o.samples,
              static_cast<ull>(o.seed), full, o.samples);
  if (!errs.empty()) {
    std::sort(errs.begin(), errs.end());
    std::size_t h = errs.size() / 2;
    double med = errs.size() % 2 ? errs[h] : 0.5 * (errs[h - 1] + errs[h]);
    std::printf(" median_dim_err=%.4f", med);
  }
  std::printf("\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"box dimensions of inhomogeneous attractors: counting, separation, "
               "envelope bounds, sphere orbits"};
  app.set_version_flag("--version", fraclab::kVersion);
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads,
                 "worker threads (default: FRACLAB_THREADS, then hardware)");

  ClassifyOpts cl;
  RenderOpts rd;
  BoxdimOpts bd;
  BoundsOpts bo;
  SepOpts se;
  OverlapOpts ov;
  WspOpts ws;
  SphereOpts sp;
  ScanOpts sc;

  CLI::App* c_cl = app.add_subcommand("classify", "algebraic class of a contraction");
  c_cl->fallthrough();
  CLI::Option_group* src = c_cl->add_option_group("source");
  src->add_option("--poly", cl.poly,
                  "integer polynomial of the reciprocal, e.g. \"x^2-2\"");
  src->add_option("--lambda", cl.lambda, "decimal contraction in (0,1)");
  src->require_option(1);
  c_cl->add_flag("--dry-run", cl.dry, "validate inputs and print the plan only");
  c_cl->callback([&] { run_classify(cl); });

  CLI::App* c_rd = app.add_subcommand("render", "SVG of a system's point cloud");
  c_rd->fallthrough();
  add_system_flags(c_rd, rd.sys);
  c_rd->add_option("--m", rd.m, "raster mesh exponent");
  c_rd->add_option("--delta", rd.delta, "cloud resolution (default 2^-m)");
  c_rd->add_option("--out", rd.out, "output SVG path")->required();
  c_rd->add_option("--max-words", rd.max_words, "enumeration word budget");
  c_rd->add_flag("--dry-run", rd.dry, "validate inputs and print the plan only");
  c_rd->callback([&] { run_render(rd); });

  CLI::App* c_bd = app.add_subcommand("boxdim", "box-dimension estimate over a mesh range");
  c_bd->fallthrough();
  add_system_flags(c_bd, bd.sys);
  c_bd->add_option("--m", bd.m_range, "mesh exponents lo:hi")->required();
  c_bd->add_option("--window", bd.window, "fit window lo:hi (default: all of --m)");
  c_bd->add_option("--csv", bd.csv, "write the count curve here");
  c_bd->add_flag("--fixed-cloud", bd.fixed_cloud,
                 "count one cloud generated at the finest scale (refinement-monotone)");
  c_bd->add_flag("--allow-partial", bd.allow_partial,
                 "keep a truncated curve instead of failing");
  CLI::Option* rate_opt = c_bd->add_option(
      "--rate", bd.rate_limit, "fit the count deviation against this dimension limit");
  c_bd->add_option("--max-words", bd.max_words, "enumeration word budget");
  c_bd->add_flag("--dry-run", bd.dry, "validate inputs and print the plan only");
  c_bd->callback([&] {
    bd.rate_given = rate_opt->count() > 0;
    run_boxdim(bd, threads);
  });

  CLI::App* c_bo = app.add_subcommand("bounds", "envelope dimension bound and closed forms");
  c_bo->fallthrough();
  CLI::Option* s_opt = c_bo->add_option("--s", bo.s, "similarity dimension");
  c_bo->add_option("--alpha", bo.alpha, "dimension of the homogeneous attractor");
  c_bo->add_option("--beta", bo.beta, "upper box dimension of the condensation set");
  c_bo->add_option("--gamma", bo.gamma, "growth rate of distinct linear parts");
  CLI::Option* d_opt = c_bo->add_option("--d", bo.d, "ambient dimension");
  c_bo->add_option("--config", bo.config, "derive s and d from a JSON system");
  c_bo->add_option("--json", bo.json_out, "write the full report here");
  CLI::Option* ar_opt =
      c_bo->add_option("--alpha-r", bo.alpha_r_scale,
                       "also solve the reduced stopping-set dimension at this scale");
  CLI::Option* gk_opt =
      c_bo->add_option("--estimate-gamma", bo.gamma_kmax,
                       "also fit the linear-part growth rate up to this level");
  c_bo->add_flag("--dry-run", bo.dry, "validate inputs and print the plan only");
  c_bo->callback([&] {
    bo.s_given = s_opt->count() > 0;
    bo.d_given = d_opt->count() > 0;
    bo.alpha_r_given = ar_opt->count() > 0;
    bo.gamma_given = gk_opt->count() > 0;
    run_bounds(bo);
  });

  CLI::App* c_se = app.add_subcommand("separation", "distinct-sum and gap table for the comb");
  c_se->fallthrough();
  c_se->add_option("--lambda", se.lambda, "contraction as a decimal (float mode)");
  c_se->add_option("--lambda-poly", se.lambda_poly,
                   "polynomial of the reciprocal (adds exact collision search)");
  c_se->add_option("--n-max", se.n_max, "deepest word length");
  c_se->add_option("--kappa", se.kappa, "well-separation threshold constant");
  CLI::Option* sthr_opt =
      c_se->add_option("--s", se.s_thr, "also count value pairs within s*2^-n");
  c_se->add_option("--csv", se.csv, "write the per-n table here");
  c_se->add_flag("--dry-run", se.dry, "validate inputs and print the plan only");
  c_se->callback([&] {
    se.s_given = sthr_opt->count() > 0;
    run_separation(se);
  });

  CLI::App* c_ov = app.add_subcommand("overlaps", "pairs of words whose maps coincide");
  c_ov->fallthrough();
  ov.sys.preset = "bernoulli_comb";
  add_system_flags(c_ov, ov.sys);
  c_ov->add_option("--max-len", ov.max_len, "longest word length");
  c_ov->add_option("--tol", ov.tol, "float-mode coincidence tolerance");
  c_ov->add_option("--json", ov.json_out, "write the pair report here");
  CLI::Option* red_opt = c_ov->add_option(
      "--reduced", ov.reduced_r, "also count stopping-set classes at this scale");
  c_ov->add_flag("--dry-run", ov.dry, "validate inputs and print the plan only");
  c_ov->callback([&] {
    ov.reduced_given = red_opt->count() > 0;
    run_overlaps(ov);
  });

  CLI::App* c_ws = app.add_subcommand("wsp", "distance of inverse-composed map pairs from the identity");
  c_ws->fallthrough();
  ws.sys.preset = "bernoulli_comb";
  add_system_flags(c_ws, ws.sys);
  c_ws->add_option("--max-len", ws.max_len, "longest word length");
  c_ws->add_option("--tol", ws.tol, "float-mode equivalence tolerance");
  c_ws->add_option("--csv", ws.csv, "write the margin table here");
  c_ws->add_flag("--dry-run", ws.dry, "validate inputs and print the plan only");
  c_ws->callback([&] { run_wsp(ws); });

  CLI::App* c_sp = app.add_subcommand("sphere", "orbit growth and scaled-orbit attractor");
  c_sp->fallthrough();
  c_sp->add_option("--config", sp.config,
                   "JSON: generators (matrix or axis-angle), include_inverses, x0, c");
  CLI::Option* x_opt = c_sp->add_option("--x", sp.x_text, "base point, comma-separated");
  c_sp->add_option("--n-max", sp.n_max, "deepest word length");
  c_sp->add_option("--m", sp.m, "counting mesh exponent");
  c_sp->add_flag("--commuting", sp.commuting, "use the commuting control pair");
  c_sp->add_flag("--sg", sp.sg, "build the scaled-orbit attractor instead");
  c_sp->add_option("--c", sp.c, "contraction for --sg");
  c_sp->add_option("--sg-m", sp.sg_m, "finest mesh exponent for --sg");
  c_sp->add_option("--max-words", sp.max_words, "expansion word budget");
  c_sp->add_option("--csv", sp.csv, "write counts (or the --sg curve) here");
  c_sp->add_option("--svg", sp.svg, "render the cloud here");
  c_sp->add_flag("--dry-run", sp.dry, "validate inputs and print the plan only");
  c_sp->callback([&] {
    sp.x_given = x_opt->count() > 0;
    run_sphere(sp);
  });

  CLI::App* c_sc = app.add_subcommand("scan", "sampled separation check across an interval");
  c_sc->fallthrough();
  c_sc->add_option("--lo", sc.lo, "interval lower end");
  c_sc->add_option("--hi", sc.hi, "interval upper end");
  c_sc->add_option("--samples", sc.samples, "number of sampled contractions");
  c_sc->add_option("--n-max", sc.n_max, "deepest word length per sample");
  c_sc->add_option("--seed", sc.seed, "sampler seed");
  c_sc->add_option("--dim-samples", sc.dim_samples,
                   "samples that also get a box-dimension estimate");
  c_sc->add_option("--dim-window", sc.dim_window, "mesh exponents lo:hi for those");
  c_sc->add_option("--csv", sc.csv, "write the per-sample summary here");
  c_sc->add_flag("--dry-run", sc.dry, "validate inputs and print the plan only");
  c_sc->callback([&] { run_scan(sc); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);  // --help / --version
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error: %s\n\n%s", e.what(), app.help().c_str());
    return 64;
  } catch (const fraclab::ResourceError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const fraclab::DomainError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const fraclab::PrecisionError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 70;
  }
  return 0;
}
