#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "counterca/counter_automaton.hpp"
#include "counterca/counter_model.hpp"
#include "counterca/expansivity.hpp"
#include "counterca/lyapunov.hpp"
#include "counterca/measures.hpp"
#include "counterca/spacetime_io.hpp"

namespace counterca::cli {

namespace fs = std::filesystem;
using nlohmann::json;

void RunContext::write(const std::string& name, const std::string& content) {
  fs::create_directories(out_dir);
  const fs::path p = out_dir / name;
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out << content;
  outputs.push_back(p.string());
}

namespace {

const KeySpec kSeed{"seed", "1", "master seed"};
const KeySpec kNu{"nu", "0.6666666666666666", "geometric parameter of the counter length law"};
const KeySpec kBurnIn{"burn_in_T", "256", "burn-in steps drawn uniformly in 0..T-1"};

std::ostringstream csv() {
  std::ostringstream out;
  out << std::setprecision(10);
  return out;
}

MeasureParams measure_params(const RunConfig& cfg) {
  MeasureParams p;
  p.seed = cfg.u64("seed");
  if (cfg.values().count("nu")) p.nu = cfg.real("nu");
  if (cfg.values().count("burn_in_T")) p.burn_in_T = static_cast<int>(cfg.integer("burn_in_T"));
  if (cfg.values().count("half_width")) p.half_width = static_cast<int>(cfg.integer("half_width"));
  validate(p);
  return p;
}

std::vector<int> ints(const RunConfig& cfg, const std::string& key) {
  std::vector<int> out;
  for (auto v : cfg.int_list(key)) out.push_back(static_cast<int>(v));
  return out;
}

Side side_of(const std::string& s) { return parse_side(s); }

// fixture-check ------------------------------------------------------------

const std::vector<Counter> kModelColumn{{3, 3, 0}, {3, 4, 0}, {3, 5, 0}, {3, 6, 0}, {3, 7, 0},
                                        {3, 0, 3}, {3, 1, 2}, {3, 2, 1}, {3, 3, 0}, {3, 4, 0}};

int run_fixture_check(const RunConfig& cfg, RunContext& ctx) {
  const std::string path = cfg.str("fixture");
  if (!fs::exists(path)) {
    std::cerr << "missing fixture asset: " << path << "\n";
    return kMissingAsset;
  }
  Fixture fix = load_fixture(path);
  RuleTable proj = projection_table();
  RuleTable digits = digit_table();
  const Alphabet a = counter_alphabet();
  if (const auto& nb = cfg.str("corrupt"); !nb.empty()) {
    std::vector<Symbol> cells;
    for (char c : nb) cells.push_back(a.parse(c));
    const Symbol v = a.parse(cfg.str("corrupt_value").at(0));
    if (cells.size() == 5)
      digits = digits.with_entry(digits.index_of(cells), v);
    else if (cells.size() == 7)
      proj = proj.with_entry(proj.index_of(cells), v);
    else
      throw ConfigError("key 'corrupt': expected 5 (digit rule) or 7 (projection) glyphs");
  }
  CounterAutomaton F(proj, digits);

  const int rows = static_cast<int>(fix.rows.size());
  auto d = orbit(fixture_initial(fix), F, rows - 1);
  std::string text;
  for (const auto& row : d.rows) {
    for (Coord c = 0; c < static_cast<Coord>(fix.rows.front().size()); ++c) text.push_back(a.glyph(row.at(c)));
    text.push_back('\n');
  }
  ctx.write("fixture-check.txt", text);

  int status = kOk;
  auto mismatch = check_fixture(fix, F);
  ctx.summary["rows"] = rows;
  if (mismatch) {
    std::cout << "mismatch at row " << mismatch->row << " col " << mismatch->col << ": expected '"
              << mismatch->expected << "' got '" << mismatch->got << "'\n";
    std::cout << "  expected " << fix.rows[static_cast<std::size_t>(mismatch->row)] << "\n";
    std::cout << "  got      " << text.substr(static_cast<std::size_t>(mismatch->row) * (fix.rows.front().size() + 1),
                                              fix.rows.front().size())
              << "\n";
    ctx.summary["mismatch"] = {{"row", mismatch->row}, {"col", mismatch->col}};
    status = kCheckFailed;
  } else {
    std::cout << "reference rows: " << rows << " rows match\n";
  }

  if (cfg.flag("counter_column")) {
    // Left counter of the reference rows: left emitter at column 1.
    int bad = -1;
    for (int t = 0; t < rows && t < static_cast<int>(kModelColumn.size()); ++t) {
      WindowConfig row = d[static_cast<std::size_t>(t)];
      row.origin -= 1;
      row.valid = {row.valid.lo - 1, row.valid.hi - 1};
      auto line = phi(row);
      std::optional<Counter> got;
      for (int i = line.first_index; i <= line.last_index(); ++i)
        if (line.left_e(i) == 0) got = line.at(i);
      if (!got || !(*got == kModelColumn[static_cast<std::size_t>(t)])) {
        bad = t;
        std::cout << "counter column mismatch at t=" << t << ": expected "
                  << to_string(kModelColumn[static_cast<std::size_t>(t)]) << " got "
                  << (got ? to_string(*got) : std::string("none")) << "\n";
        break;
      }
    }
    ctx.summary["counter_column_ok"] = bad < 0;
    if (bad >= 0) status = kCheckFailed;
    else std::cout << "counter column: match\n";
  }
  return status;
}

// simulate -------------------------------------------------------------------

int run_simulate(const RunConfig& cfg, RunContext& ctx) {
  auto dyn = make_dynamics(cfg.str("rule"));
  const Alphabet& a = dyn->alphabet();
  WindowConfig x;
  if (const auto& init = cfg.str("init"); !init.empty()) {
    x = WindowConfig::from_string(a, init, cfg.integer("origin"));
  } else {
    const auto& sampler = cfg.str("sampler");
    MeasureParams p = measure_params(cfg);
    if (sampler == "stationary") x = sample_stationary(p, 0);
    else if (sampler == "omega-star") x = sample_omega_star(p, 0);
    else if (sampler == "bernoulli") x = sample_bernoulli(a.size(), p.seed, 0, {-cfg.integer("half_width"), cfg.integer("half_width")});
    else throw ConfigError("key 'sampler': unknown sampler '" + sampler + "'");
  }
  const int steps = static_cast<int>(cfg.integer("horizon"));
  auto d = orbit(x, *dyn, steps);
  ctx.write("simulate.txt", format_diagram(d, a));

  auto out = csv();
  out << "t,valid_lo,valid_hi,emitters,high_digits\n";
  for (const auto& row : d.rows) {
    int e = 0, high = 0;
    for (Coord c = row.valid.lo; c <= row.valid.hi; ++c) {
      if (dyn->name() == "F") {
        e += row.at(c) == kE;
        high += is_high(row.at(c));
      }
    }
    out << row.time << ',' << row.valid.lo << ',' << row.valid.hi << ',' << e << ',' << high << '\n';
  }
  ctx.write("simulate.csv", out.str());
  if (dyn->name() == "F") {
    auto rep = assert_orbit_structure(d);
    json checks = json::object();
    for (auto c : {StructureCheck::EmitterMoved, StructureCheck::EmitterSpacing, StructureCheck::TripleTwo,
                   StructureCheck::MisplacedThree, StructureCheck::TwosPerCounter})
      checks[to_string(c)] = rep.count(c);
    ctx.summary["structure"] = checks;
  }
  ctx.summary["steps"] = steps;
  std::cout << "simulated " << steps << " steps of " << dyn->name() << "\n";
  return kOk;
}

// lyapunov -------------------------------------------------------------------

int run_lyapunov(const RunConfig& cfg, RunContext& ctx) {
  auto dyn = make_dynamics(cfg.str("rule"));
  MeasureParams p = measure_params(cfg);
  const auto grid = ints(cfg, "grid");
  const auto samples = static_cast<std::size_t>(cfg.integer("samples"));
  std::vector<Side> sides;
  const auto& s = cfg.str("side");
  if (s == "both") sides = {Side::Plus, Side::Minus};
  else sides = {side_of(s)};
  std::string body;
  bool header = true;
  int inconclusive = 0;
  for (Side side : sides) {
    auto est = average_exponents(p, *dyn, grid, samples, side);
    body += est.to_csv(header);
    header = false;
    for (const auto& pt : est.points) inconclusive += pt.inconclusive;
    ctx.summary["source"] = est.source;
    for (const auto& pt : est.points)
      std::cout << to_string(side) << " n=" << pt.n << " lower/n=" << pt.lower_mean << " upper/n=" << pt.upper_mean
                << "\n";
  }
  ctx.write("lyapunov.csv", body);
  ctx.summary["inconclusive_brackets"] = inconclusive;
  return kOk;
}

// period ---------------------------------------------------------------------

int run_period(const RunConfig& cfg, RunContext& ctx) {
  const auto pattern = ints(cfg, "lengths");
  const int repeats = static_cast<int>(cfg.integer("repeats"));
  if (repeats < 2) throw ConfigError("key 'repeats': need at least 2");
  const int P = static_cast<int>(pattern.size());
  int lmax = 0, lmin = 1 << 20;
  for (int l : pattern) {
    if (l < 3 || l > kMaxCounterLength) throw ConfigError("key 'lengths': lengths must lie in 3.." + std::to_string(kMaxCounterLength));
    lmax = std::max(lmax, l);
    lmin = std::min(lmin, l);
  }
  std::int64_t t = cfg.integer("horizon");
  if (t <= 0) t = 100 * (std::int64_t{1} << std::min(lmax, 20));
  std::mt19937_64 rng(cfg.u64("seed"));
  const bool random_states = cfg.flag("random_states");
  std::vector<Counter> ring;
  for (int k = 0; k < repeats; ++k)
    for (int l : pattern) ring.push_back({l, random_states ? rng() % (std::uint64_t{1} << l) : 0, 0});
  auto line = make_line(ring, 0);
  line.cyclic = true;

  auto out = csv();
  out << "index,length,steps,count,frequency,formula,formula_value,band_lo,band_hi,in_band,certified_lo,certified_hi,"
         "in_certified\n";
  const int n = static_cast<int>(ring.size());
  const int base = P * (repeats / 2);
  bool all = true;
  for (int j = 0; j < P; ++j) {
    const int i = base + j;
    std::vector<int> left;
    for (int k = 0; k < P; ++k) left.push_back(ring[static_cast<std::size_t>(((i - k) % n + n) % n)].l);
    auto exact = real_period_periodic(left);
    auto f = real_period_empirical(line, i, t);
    auto band = stationary_band(exact.to_double(), lmin, t);
    const bool in_band = band.contains(f.frequency);
    all = all && in_band && f.in_certified;
    out << i << ',' << ring[static_cast<std::size_t>(i)].l << ',' << f.steps << ',' << f.count << ',' << f.frequency
        << ',' << exact.value.str() << ',' << exact.to_double() << ',' << band.lo << ',' << band.hi << ','
        << in_band << ',' << f.certified_lo << ',' << f.certified_hi << ',' << f.in_certified << '\n';
    std::cout << "counter " << i << " (l=" << ring[static_cast<std::size_t>(i)].l << "): frequency " << f.frequency
              << ", formula " << exact.value.str() << " = " << exact.to_double() << "\n";
  }
  ctx.write("period.csv", out.str());
  ctx.summary["steps"] = t;
  ctx.summary["all_in_band"] = all;
  return all ? kOk : kCheckFailed;
}

// entropy --------------------------------------------------------------------

SampleKind kind_of(const std::string& s) { return parse_sample_kind(s); }

std::vector<WindowConfig> draw(const RunConfig& cfg, const MeasureParams& p, std::size_t count, Interval keep,
                               int alphabet, RunContext& ctx, const std::string& stem) {
  const auto& src = cfg.str("source");
  std::vector<WindowConfig> xs;
  if (src == "bernoulli") {
    for (std::size_t i = 0; i < count; ++i) xs.push_back(sample_bernoulli(alphabet, p.seed, i, keep));
    return xs;
  }
  MeasureParams q = p;
  q.min_cells_per_side = std::max(q.min_cells_per_side, std::max(-keep.lo, keep.hi) + 8);
  SampleManifest m;
  xs = sample_batch(kind_of(src), q, count, &m, keep);
  ctx.write(stem + ".samples.json", m.to_json());
  return xs;
}

int run_entropy(const RunConfig& cfg, RunContext& ctx) {
  MeasureParams p = measure_params(cfg);
  const auto samples = static_cast<std::size_t>(cfg.integer("samples"));
  const auto& units = cfg.str("units");
  if (units != "nats" && units != "bits") throw ConfigError("key 'units': expected nats or bits");
  const double scale = units == "bits" ? 1.0 / std::log(2.0) : 1.0;
  const int alphabet = static_cast<int>(cfg.integer("alphabet"));
  auto out = csv();
  const auto& mode = cfg.str("mode");
  if (mode == "spatial") {
    const auto ks = ints(cfg, "k");
    const int kmax = *std::max_element(ks.begin(), ks.end());
    auto xs = draw(cfg, p, samples, {0, kmax - 1}, alphabet, ctx, "entropy");
    out << "k,samples,block,difference,block_stderr,difference_stderr,coverage,distinct,undersampled\n";
    for (int k : ks) {
      auto e = block_entropy(xs, k);
      out << k << ',' << e.samples << ',' << e.block * scale << ',' << e.difference * scale << ','
          << e.block_stderr * scale << ',' << e.difference_stderr * scale << ',' << e.coverage << ',' << e.distinct
          << ',' << e.undersampled << '\n';
      std::cout << "k=" << k << " H_k/k=" << e.block * scale << " H_k-H_{k-1}=" << e.difference * scale << " "
                << units << "\n";
    }
  } else if (mode == "temporal") {
    auto dyn = make_dynamics(cfg.str("rule"));
    const auto Ts = ints(cfg, "T");
    const int w = static_cast<int>(cfg.integer("w"));
    const int tmax = *std::max_element(Ts.begin(), Ts.end());
    const Coord reach = static_cast<Coord>(dyn->radius()) * (tmax - 1);
    auto xs = draw(cfg, p, samples, {-reach, w - 1 + reach}, dyn->alphabet().size(), ctx, "entropy");
    auto words = column_words(xs, *dyn, w, tmax);
    out << "w,T,samples,rate,difference,rate_stderr,coverage,distinct,undersampled\n";
    for (int T : Ts) {
      auto e = column_entropy(words, w, T);
      out << w << ',' << T << ',' << e.samples << ',' << e.block * scale << ',' << e.difference * scale << ','
          << e.block_stderr * scale << ',' << e.coverage << ',' << e.distinct << ',' << e.undersampled << '\n';
      std::cout << "w=" << w << " T=" << T << " H/T=" << e.block * scale << " " << units << "\n";
    }
  } else {
    throw ConfigError("key 'mode': expected spatial or temporal");
  }
  ctx.write("entropy.csv", out.str());
  return kOk;
}

// uniformity -----------------------------------------------------------------

int run_uniformity(const RunConfig& cfg, RunContext& ctx) {
  MeasureParams p = measure_params(cfg);
  p.half_width = 2;
  const auto samples = static_cast<std::size_t>(cfg.integer("samples"));
  const int index = static_cast<int>(cfg.integer("index"));
  const auto& src = cfg.str("source");
  MeasureParams q = p;
  q.min_cells_per_side = 2 * p.burn_in_T + 40 + 8 * std::abs(index);
  std::vector<CounterLine> lines;
  for (std::size_t i = 0; i < samples; ++i) {
    WindowConfig x;
    if (src == "omega-star") {
      x = sample_omega_star(q, i);
    } else {
      x = sample_stationary(q, i);
      if (src == "burned-in") {
        auto a = counter_span(x, std::min(index, 0));
        auto b = counter_span(x, std::max(index, 0));
        if (!a || !b) throw WindowExhausted("counter not visible in sample " + std::to_string(i), 0);
        x = cesaro_burnin_k(x, draw_burnin(p, i), Interval{a->lo, b->hi}).cfg;
      } else if (src != "stationary") {
        throw ConfigError("key 'source': unknown source '" + src + "'");
      }
    }
    lines.push_back(phi(x));
  }
  auto rep = uniformity_check(lines, index, {}, static_cast<std::size_t>(cfg.integer("min_count")));
  auto out = csv();
  out << "index,lengths,count,tv,starved\n";
  for (const auto& c : rep.classes) {
    std::string ls;
    for (int l : c.lengths) ls += (ls.empty() ? "" : ";") + std::to_string(l);
    out << index << ',' << ls << ',' << c.count << ',' << c.tv << ',' << c.starved << '\n';
    if (!c.starved) std::cout << "l=" << ls << " count=" << c.count << " tv=" << c.tv << "\n";
  }
  ctx.write("uniformity.csv", out.str());
  ctx.summary["skipped"] = rep.skipped;
  ctx.summary["notes"] = rep.notes;
  return kOk;
}

// sensitivity ----------------------------------------------------------------

int run_sensitivity(const RunConfig& cfg, RunContext& ctx) {
  MeasureParams p = measure_params(cfg);
  p.half_width = 4;
  const auto pairs = static_cast<std::size_t>(cfg.integer("samples"));
  const std::int64_t horizon = cfg.integer("horizon");
  const auto& mode = cfg.str("mode");
  auto out = csv();
  if (mode == "resize") {
    const int index = static_cast<int>(cfg.integer("index"));
    const int delta = static_cast<int>(cfg.integer("delta"));
    MeasureParams q = p;
    q.min_cells_per_side = 2 * horizon + 64;
    out << "pair,index,depth,old_length,new_length,time,censored,gap,gap_error,margin,gap_positive,"
           "gap_exceeds_margin\n";
    std::size_t diverged = 0, positive = 0;
    for (std::size_t i = 0; i < pairs; ++i) {
      auto x = sample_stationary(q, i);
      auto span = counter_span(x, index);
      if (!span) throw WindowExhausted("counter not visible in pair " + std::to_string(i), 0);
      const int old = static_cast<int>(span->length()) - 2;
      const int nl = old + delta >= 3 ? old + delta : old - delta;
      auto rec = sensitivity_divergence(x, index, nl, horizon);
      diverged += !rec.censored();
      positive += rec.gap_positive();
      out << i << ',' << index << ',' << rec.depth << ',' << rec.old_length << ',' << rec.new_length << ','
          << (rec.time ? std::to_string(*rec.time) : std::string()) << ',' << rec.censored() << ','
          << static_cast<double>(rec.gap) << ',' << static_cast<double>(rec.gap_error) << ','
          << static_cast<double>(rec.margin) << ',' << rec.gap_positive() << ',' << rec.gap_exceeds_margin() << '\n';
    }
    ctx.summary["diverged"] = diverged;
    ctx.summary["gap_positive"] = positive;
    std::cout << diverged << "/" << pairs << " pairs diverged within " << horizon << " steps; " << positive << "/"
              << pairs << " with positive period gap\n";
  } else if (mode == "resample") {
    std::vector<std::int64_t> horizons;
    for (std::int64_t h = 10; h < horizon; h *= 10) horizons.push_back(h);
    horizons.push_back(horizon);
    const auto depths = ints(cfg, "depths");
    auto stat = mu_expansiveness_stat(p, pairs, horizons, depths);
    out << "depth,pair,time,censored\n";
    for (std::size_t d = 0; d < depths.size(); ++d)
      for (std::size_t i = 0; i < stat.times[d].size(); ++i) {
        const auto& t = stat.times[d][i];
        out << depths[d] << ',' << i << ',' << (t ? std::to_string(*t) : std::string()) << ',' << !t << '\n';
      }
    auto fr = csv();
    fr << "depth,horizon,pairs,diverged,fraction\n";
    for (const auto& r : stat.rows) {
      fr << r.depth << ',' << r.horizon << ',' << r.pairs << ',' << r.diverged << ',' << r.fraction() << '\n';
      std::cout << "depth " << r.depth << " horizon " << r.horizon << ": " << r.fraction() << "\n";
    }
    ctx.write("sensitivity-fractions.csv", fr.str());
  } else {
    throw ConfigError("key 'mode': expected resize or resample");
  }
  ctx.write("sensitivity.csv", out.str());
  return kOk;
}

// expansive ------------------------------------------------------------------

int run_expansive(const RunConfig& cfg, RunContext& ctx) {
  auto dyn = make_dynamics(cfg.str("rule"));
  auto table = std::dynamic_pointer_cast<TableDynamics>(dyn);
  if (!table) throw ConfigError("key 'rule': the search needs a single-table rule");
  auto rep = find_nplus(table->table(), static_cast<int>(cfg.integer("cap")));
  json cert = {{"rule", dyn->name()},
               {"radius", rep.radius},
               {"cap", rep.cap},
               {"configurations", rep.configurations},
               {"n_plus", rep.n_plus ? json(*rep.n_plus) : json(nullptr)}};
  if (rep.n_plus) {
    cert["lambda_bound"] = rep.lambda_bound.str();
    cert["verified"] = verify_nplus(table->table(), *rep.n_plus);
  }
  ctx.write("expansive.json", cert.dump(2) + "\n");

  const Coord hw = cfg.integer("half_width");
  auto x = sample_bernoulli(dyn->alphabet().size(), cfg.u64("seed"), 0, {-hw, hw});
  auto g = expansive_growth_check(*dyn, rep, x, static_cast<int>(cfg.integer("horizon")));
  auto out = csv();
  out << "t,n,required,lower,upper\n";
  for (const auto& r : g.rows) out << r.t << ',' << r.n << ',' << r.required << ',' << r.lower << ',' << r.upper << '\n';
  ctx.write("expansive.csv", out.str());
  ctx.summary["n_plus"] = cert["n_plus"];
  ctx.summary["growth"] = to_string(g.status);
  if (!g.note.empty()) ctx.summary["growth_note"] = g.note;
  std::cout << "N+ = " << (rep.n_plus ? std::to_string(*rep.n_plus) : std::string("not found up to cap"))
            << "; growth check " << to_string(g.status) << "\n";
  if (rep.n_plus && !cert["verified"].get<bool>()) return kCheckFailed;
  return kOk;
}

}  // namespace

const std::vector<Command>& commands() {
  static const std::vector<Command> all = {
      {"fixture-check",
       "regenerate the reference diagram and the counter column",
       {kSeed,
        {"fixture", std::string(COUNTERCA_DATA_DIR) + "/reference_orbit.txt", "fixture file"},
        {"counter_column", "true", "also compare the left counter with the model column"},
        {"corrupt", "", "neighbourhood (5 or 7 glyphs) whose table entry is replaced"},
        {"corrupt_value", "0", "replacement glyph"}},
       run_fixture_check},
      {"simulate",
       "iterate a rule and write the space-time diagram",
       {kSeed, kNu, kBurnIn,
        {"rule", "F", "F, xor, identity or shift"},
        {"init", "", "initial row (glyphs); empty draws a sample"},
        {"origin", "0", "coordinate of the first glyph of init"},
        {"sampler", "stationary", "stationary, omega-star or bernoulli"},
        {"half_width", "30", "counters (or cells for bernoulli) per side"},
        {"horizon", "40", "steps"}},
       run_simulate},
      {"lyapunov",
       "average perturbation-depth brackets I_n/n",
       {kSeed, kNu, kBurnIn,
        {"rule", "F", "F, xor, identity or shift"},
        {"side", "both", "+, - or both"},
        {"grid", "32,64,128,256", "horizons n"},
        {"samples", "100", "configurations"}},
       run_lyapunov},
      {"period",
       "overflow frequency on a ring against the closed form",
       {kSeed,
        {"lengths", "3", "length pattern, repeated around the ring"},
        {"repeats", "4", "copies of the pattern"},
        {"random_states", "false", "draw initial counter states from the seed"},
        {"horizon", "0", "steps; 0 means 100 * 2^max(length)"}},
       run_period},
      {"entropy",
       "plug-in block (spatial) or column (temporal) entropy",
       {kSeed, kNu, kBurnIn,
        {"mode", "spatial", "spatial or temporal"},
        {"source", "burned-in", "burned-in, stationary, omega-star or bernoulli"},
        {"alphabet", "2", "bernoulli alphabet size for spatial mode"},
        {"rule", "F", "rule for temporal mode"},
        {"k", "1,2,4,8", "block lengths"},
        {"w", "1", "column width"},
        {"T", "64,128,256", "column horizons"},
        {"samples", "20000", "configurations"},
        {"units", "nats", "nats or bits"}},
       run_entropy},
      {"uniformity",
       "conditional law of one counter state given its length",
       {kSeed, kNu, kBurnIn,
        {"source", "burned-in", "burned-in, stationary or omega-star"},
        {"index", "-1", "counter index"},
        {"samples", "50000", "configurations"},
        {"min_count", "10000", "samples a class needs to be reported"}},
       run_uniformity},
      {"sensitivity",
       "central divergence of pairs that differ left of the origin",
       {kSeed, kNu,
        {"mode", "resize", "resize (one counter relaid) or resample (all counters left of a depth)"},
        {"index", "-1", "resized counter"},
        {"delta", "1", "length change"},
        {"depths", "1,3", "resample depths"},
        {"samples", "100", "pairs"},
        {"horizon", "100000", "maximal divergence time"}},
       run_sensitivity},
      {"expansive",
       "search N+ and check bracket growth",
       {kSeed,
        {"rule", "xor", "xor, identity or shift"},
        {"cap", "6", "largest N tried"},
        {"half_width", "120", "cells per side of the growth-check sample"},
        {"horizon", "8", "growth-check multiples t"}},
       run_expansive},
  };
  return all;
}

const Command* find_command(const std::string& name) {
  for (const auto& c : commands())
    if (c.name == name) return &c;
  return nullptr;
}

int execute(const Command& cmd, const RunConfig& cfg, const fs::path& out_dir) {
  RunContext ctx;
  ctx.out_dir = out_dir;
  const auto start = std::chrono::steady_clock::now();
  const int status = cmd.run(cfg, ctx);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json m = {{"command", cmd.name},
            {"version", COUNTERCA_VERSION},
            {"seed", cfg.u64("seed")},
            {"config", cfg.values()},
            {"config_digest", cfg.digest()},
            {"wall_time_s", wall},
            {"exit_status", status},
            {"outputs", ctx.outputs},
            {"summary", ctx.summary}};
  const fs::path mp = out_dir / (cmd.name + ".manifest.json");
  fs::create_directories(out_dir);
  std::ofstream(mp) << m.dump(2) << "\n";
  std::cout << "manifest: " << mp.string() << "\n";
  return status;
}

}  // namespace counterca::cli
