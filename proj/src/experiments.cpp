// Copyright 2026 The mot_hijack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mothijack/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "mothijack/errors.hpp"

namespace mothijack {

std::string_view to_string(AttackKind k) {
  return k == AttackKind::kHijack ? "hijack" : "erase";
}

AttackKind attack_kind_from(std::string_view s) {
  if (s == "hijack") return AttackKind::kHijack;
  if (s == "erase") return AttackKind::kErase;
  throw std::invalid_argument("unknown attack kind '" + std::string(s) + "'");
}

namespace {

template <class... Fs>
struct Overload : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overload(Fs...) -> Overload<Fs...>;

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string two_digits(int i) {
  return (i < 10 ? "0" : "") + std::to_string(i);
}

}  // namespace

Scenario ScenarioSource::instantiate(std::uint64_t seed, int hit_count) const {
  Scenario s = std::visit(
      Overload{[&](std::filesystem::path const& p) {
                 return with_jitter(load_scenario(p, hit_count), file_sigma, seed);
               },
               [&](MoveInParams p) {
                 p.seed = seed;
                 return gen_move_in(p);
               },
               [&](MoveOutParams p) {
                 p.seed = seed;
                 return gen_move_out(p);
               },
               [&](StraightLineParams p) {
                 p.seed = seed;
                 return gen_straight_line(p);
               },
               [&](HeadingChangeParams p) {
                 p.line.seed = seed;
                 return gen_heading_change(p);
               }},
      origin);
  s.name = id;
  s.validate(hit_count);
  return s;
}

std::vector<ScenarioSource> bundled_hijack_set() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<ScenarioSource> in, out;
  for (int i = 0; i < 10; ++i) {
    double const side = i % 2 ? -1.0 : 1.0;
    MoveInParams p;
    p.lateral_offset = side * (3.0 + u(rng));
    p.forward_speed = 6.0 + 2.0 * u(rng);
    p.start_depth = 40.0 + 15.0 * u(rng);
    MoveOutParams q;
    q.start_depth = 10.0 + 10.0 * u(rng);
    q.relative_speed = -0.5 + 1.5 * u(rng);
    q.lateral_offset = side * (0.1 + 0.3 * u(rng));
    in.push_back({"move-in-" + two_digits(i), p});
    out.push_back({"move-out-" + two_digits(i), q});
  }
  in.insert(in.end(), out.begin(), out.end());
  return in;
}

std::vector<ScenarioSource> bundled_straight_lines() {
  std::vector<ScenarioSource> out;
  Vec2 const velocities[] = {{2.0, 0.5}, {-1.5, 0.0}, {0.0, 1.0}, {3.0, -1.0}, {0.5, 0.5}};
  Vec2 const directions[] = {{0.0, 1.0}, {0.0, -1.0}, {1.0, 0.0}, {-1.0, 0.0}, {1.0, -1.0}};
  for (int i = 0; i < 5; ++i) {
    StraightLineParams p;
    p.start = {400.0 + 60.0 * i, 250.0 + 20.0 * i};
    p.velocity = velocities[i];
    p.attack_direction = directions[i];
    out.push_back({"straight-line-" + two_digits(i), p});
  }
  return out;
}

std::vector<ScenarioSource> bundled_heading_changes() {
  std::vector<ScenarioSource> out;
  double const turns[] = {30.0, -45.0, 60.0, -90.0, 20.0};
  for (int i = 0; i < 5; ++i) {
    HeadingChangeParams p;
    p.line.start = {420.0 + 50.0 * i, 300.0};
    p.line.velocity = {3.0, 0.5 * (i - 2)};
    p.line.sigma = 0.5;
    p.turn_frame = 30 + 10 * i;
    p.turn_degrees = turns[i];
    out.push_back({"heading-change-" + two_digits(i), p});
  }
  return out;
}

std::vector<ScenarioSource> scenario_set(std::string_view name) {
  if (name == "bundled") return bundled_hijack_set();
  if (name == "move-in" || name == "move-out") {
    auto all = bundled_hijack_set();
    std::string const prefix = std::string(name) + "-";
    std::erase_if(all, [&](ScenarioSource const& s) { return s.id.rfind(prefix, 0) != 0; });
    return all;
  }
  if (name == "straight-line") return bundled_straight_lines();
  if (name == "heading-change") return bundled_heading_changes();
  throw std::invalid_argument("unknown scenario set '" + std::string(name) + "'");
}

std::uint64_t trial_seed(std::uint64_t master, std::string_view scenario_id, int trial) {
  // FNV-1a over the id keeps the seed stable across platforms.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : scenario_id) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return splitmix(splitmix(master ^ h) + static_cast<std::uint64_t>(trial));
}

namespace {

int frames_after_start(Scenario const& s, int start_frame) {
  return static_cast<int>(s.frames.size()) - start_frame - 1;
}

}  // namespace

int min_frames(Scenario const& scenario, TrackerConfig const& config, AttackSpec spec) {
  int const limit = frames_after_start(scenario, spec.start_frame);
  for (int k = 1; k <= limit; ++k) {
    spec.max_frames = k;
    AttackResult const r = hijack(scenario, config, spec);
    if (r.success()) return k;
    if (r.status == AttackStatus::kInfeasible) {
      throw NoSuccess("min_frames: infeasible at k = " + std::to_string(k) + ": " + r.message);
    }
  }
  throw NoSuccess("min_frames: no attack length up to " + std::to_string(limit) + " succeeds");
}

int min_erase_frames(Scenario const& scenario, TrackerConfig const& config, EraseSpec spec) {
  int const limit = frames_after_start(scenario, spec.start_frame);
  for (int k = 1; k <= limit; ++k) {
    spec.n_frames = k;
    if (erase_attack(scenario, config, spec).success()) return k;
  }
  throw NoSuccess("min_erase_frames: no erase length up to " + std::to_string(limit) +
                  " succeeds");
}

AttackResult run_attack(Scenario const& scenario, TrackerConfig const& config, AttackKind kind,
                        int k, double ae_success_prob, std::uint64_t seed) {
  if (kind == AttackKind::kHijack) {
    AttackSpec spec = AttackSpec::for_scenario(scenario);
    spec.max_frames = k;
    spec.ae_success_prob = ae_success_prob;
    spec.seed = seed;
    return hijack(scenario, config, spec);
  }
  EraseSpec spec;
  spec.n_frames = k;
  spec.ae_success_prob = ae_success_prob;
  spec.seed = seed;
  return erase_attack(scenario, config, spec);
}

double success_rate(std::vector<ScenarioSource> const& scenarios, TrackerConfig const& config,
                    AttackKind kind, int k, int trials, std::uint64_t seed,
                    double ae_success_prob) {
  if (trials < 1) throw std::invalid_argument("success_rate: trials must be >= 1");
  if (scenarios.empty()) throw std::invalid_argument("success_rate: no scenarios");
  int ok = 0;
  for (auto const& src : scenarios) {
    for (int t = 0; t < trials; ++t) {
      std::uint64_t const ts = trial_seed(seed, src.id, t);
      Scenario const s = src.instantiate(ts, config.hit_count);
      ok += run_attack(s, config, kind, k, ae_success_prob, splitmix(ts)).success();
    }
  }
  return static_cast<double>(ok) / (static_cast<double>(trials) * scenarios.size());
}

double required_erase_reliability(int reserved_age) {
  if (reserved_age < 1) throw std::invalid_argument("reserved_age must be >= 1");
  return static_cast<double>(reserved_age - 1) / reserved_age;
}

void SweepConfig::validate() const {
  if (scenario_sets.empty() && scenario_files.empty()) {
    throw ValidationError("scenarios: at least one scenario set or file is required");
  }
  for (auto const& n : scenario_sets) {
    try {
      scenario_set(n);
    } catch (std::invalid_argument const& e) {
      throw ValidationError(std::string("scenario_sets: ") + e.what());
    }
  }
  if (!(file_sigma >= 0.0)) throw ValidationError("file_sigma: must be >= 0");
  if (cov_grid.empty()) throw ValidationError("cov: grid is empty");
  for (double c : cov_grid) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw ValidationError("cov: values must be finite and >= 0");
  }
  if (presets.empty()) throw ValidationError("presets: grid is empty");
  for (auto const& p : presets) {
    if (p.reserved_age < 1 || p.hit_count < 1) {
      throw ValidationError("presets: R and H must be >= 1");
    }
  }
  if (frames.empty()) throw ValidationError("frames: grid is empty");
  for (int k : frames) {
    if (k < 1) throw ValidationError("frames: values must be >= 1");
  }
  if (kinds.empty()) throw ValidationError("kinds: list is empty");
  if (!(ae_success_prob >= 0.0 && ae_success_prob <= 1.0)) {
    throw ValidationError("ae_success_prob: must lie in [0, 1]");
  }
  if (trials < 1) throw ValidationError("trials: must be >= 1");
  if (workers < 1) throw ValidationError("workers: must be >= 1");
}

std::vector<ScenarioSource> SweepConfig::sources() const {
  std::vector<ScenarioSource> out;
  std::set<std::string> seen;
  auto add = [&](ScenarioSource s) {
    if (seen.insert(s.id).second) out.push_back(std::move(s));
  };
  for (auto const& n : scenario_sets) {
    for (auto& s : scenario_set(n)) add(std::move(s));
  }
  for (auto const& f : scenario_files) {
    add({f.stem().string(), f, file_sigma});
  }
  return out;
}

std::string ResultRow::cell_id() const {
  return scenario + "|" + format_number(cov) + "|" + std::to_string(reserved_age) + "|" +
         std::to_string(hit_count) + "|" + std::string(to_string(kind)) + "|" +
         std::to_string(frames);
}

namespace {

using nlohmann::json;

struct Cell {
  ScenarioSource const* source = nullptr;
  double cov = 0.0;
  TrackerPreset preset;
  AttackKind kind = AttackKind::kHijack;

  std::string id() const {
    return source->id + "|" + format_number(cov) + "|" + std::to_string(preset.reserved_age) +
           "|" + std::to_string(preset.hit_count) + "|" + std::string(to_string(kind));
  }
};

// Per-cell outcome: success flag for every (trial, grid k), plus an error
// message if the cell could not run.
struct CellOutcome {
  std::vector<std::vector<bool>> ok;  // [trial][k index]
  std::string error;
};

CellOutcome run_cell(Cell const& c, SweepConfig const& cfg, std::vector<int> const& ks) {
  CellOutcome out;
  TrackerConfig tc;
  tc.reserved_age = c.preset.reserved_age;
  tc.hit_count = c.preset.hit_count;
  tc.noise.cov = c.cov;
  try {
    tc.validate();
    for (int t = 0; t < cfg.trials; ++t) {
      std::uint64_t const ts = trial_seed(cfg.seed, c.source->id, t);
      Scenario const s = c.source->instantiate(ts, tc.hit_count);
      std::vector<bool> row;
      for (int k : ks) {
        row.push_back(run_attack(s, tc, c.kind, k, cfg.ae_success_prob, splitmix(ts)).success());
      }
      out.ok.push_back(std::move(row));
    }
  } catch (std::exception const& e) {
    out.ok.clear();
    out.error = e.what();
  }
  return out;
}

json outcome_json(std::string const& id, CellOutcome const& o) {
  json j;
  j["cell"] = id;
  j["ok"] = o.ok;
  if (!o.error.empty()) j["error"] = o.error;
  return j;
}

std::map<std::string, CellOutcome> read_journal(std::filesystem::path const& p) {
  std::map<std::string, CellOutcome> done;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (json::parse_error const&) {
      continue;  // torn final line from an interrupted run
    }
    if (!j.contains("cell") || !j.contains("ok")) continue;
    CellOutcome o;
    o.ok = j.at("ok").get<std::vector<std::vector<bool>>>();
    if (j.contains("error")) o.error = j.at("error").get<std::string>();
    done[j.at("cell").get<std::string>()] = std::move(o);
  }
  return done;
}

std::optional<double> mean_min(std::vector<std::vector<bool>> const& ok,
                               std::vector<int> const& ks) {
  double sum = 0.0;
  int n = 0;
  for (auto const& row : ok) {
    for (std::size_t i = 0; i < ks.size(); ++i) {
      if (row[i]) {
        sum += ks[i];
        ++n;
        break;
      }
    }
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

bool row_less(ResultRow const& a, ResultRow const& b) {
  bool const aa = a.scenario == kAllScenarios;
  bool const ba = b.scenario == kAllScenarios;
  return std::tuple(aa, a.scenario, a.kind, a.reserved_age, a.hit_count, a.cov, a.frames) <
         std::tuple(ba, b.scenario, b.kind, b.reserved_age, b.hit_count, b.cov, b.frames);
}

}  // namespace

ResultTable run_sweep(SweepConfig const& cfg, SweepOptions const& opts) {
  cfg.validate();
  std::vector<ScenarioSource> const sources = cfg.sources();

  std::vector<int> ks = cfg.frames;
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

  std::vector<Cell> cells;
  {
    std::set<std::string> seen;
    for (auto const& src : sources) {
      for (double cov : cfg.cov_grid) {
        for (auto const& p : cfg.presets) {
          for (AttackKind kind : cfg.kinds) {
            Cell c{&src, cov, p, kind};
            if (seen.insert(c.id()).second) cells.push_back(c);
          }
        }
      }
    }
  }

  std::map<std::string, CellOutcome> done;
  if (opts.journal) done = read_journal(*opts.journal);

  std::vector<CellOutcome> outcomes(cells.size());
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    auto it = done.find(cells[i].id());
    bool const usable = it != done.end() &&
                        (!it->second.error.empty() ||
                         (it->second.ok.size() == static_cast<std::size_t>(cfg.trials) &&
                          std::all_of(it->second.ok.begin(), it->second.ok.end(),
                                      [&](auto const& r) { return r.size() == ks.size(); })));
    if (usable) {
      outcomes[i] = it->second;
    } else {
      todo.push_back(i);
    }
  }

  std::ofstream journal;
  if (opts.journal) {
    journal.open(*opts.journal, std::ios::app);
    if (!journal) throw Error("cannot open journal '" + opts.journal->string() + "'");
  }
  std::mutex journal_mu;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < todo.size(); j = next++) {
      std::size_t const i = todo[j];
      outcomes[i] = run_cell(cells[i], cfg, ks);
      if (journal.is_open()) {
        std::string const line = outcome_json(cells[i].id(), outcomes[i]).dump();
        std::lock_guard lock(journal_mu);
        journal << line << '\n';
        journal.flush();
      }
    }
  };
  int const width = std::min<int>(cfg.workers, static_cast<int>(std::max<std::size_t>(1, todo.size())));
  if (width <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < width; ++w) pool.emplace_back(worker);
  }

  // Workers append in completion order; once every cell is known the
  // journal is rewritten in cell order so finished runs leave the same bytes.
  if (opts.journal) {
    journal.close();
    std::filesystem::path const tmp = opts.journal->string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::trunc);
      for (std::size_t i = 0; i < cells.size(); ++i) {
        out << outcome_json(cells[i].id(), outcomes[i]).dump() << '\n';
      }
      if (!out) throw Error("cannot write journal '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, *opts.journal);
  }

  ResultTable table;
  table.seed = cfg.seed;

  struct Pool {
    std::vector<std::vector<bool>> ok;
    std::vector<std::string> errors;
  };
  std::map<std::tuple<double, int, int, AttackKind>, Pool> pooled;

  for (std::size_t i = 0; i < cells.size(); ++i) {
    Cell const& c = cells[i];
    CellOutcome const& o = outcomes[i];
    Pool& agg = pooled[{c.cov, c.preset.reserved_age, c.preset.hit_count, c.kind}];
    if (!o.error.empty()) agg.errors.push_back(c.source->id + ": " + o.error);
    agg.ok.insert(agg.ok.end(), o.ok.begin(), o.ok.end());

    std::optional<double> const mm = o.error.empty() ? mean_min(o.ok, ks) : std::nullopt;
    for (std::size_t ki = 0; ki < ks.size(); ++ki) {
      ResultRow r;
      r.scenario = c.source->id;
      r.cov = c.cov;
      r.reserved_age = c.preset.reserved_age;
      r.hit_count = c.preset.hit_count;
      r.kind = c.kind;
      r.frames = ks[ki];
      r.error = o.error;
      if (o.error.empty()) {
        int n = 0;
        for (auto const& row : o.ok) n += row[ki];
        r.trials = static_cast<int>(o.ok.size());
        r.success_rate = static_cast<double>(n) / r.trials;
        r.mean_min_frames = mm;
      }
      table.rows.push_back(std::move(r));
    }
  }

  for (auto const& [key, agg] : pooled) {
    auto const& [cov, rr, hh, kind] = key;
    std::optional<double> const mm = mean_min(agg.ok, ks);
    std::string err;
    for (auto const& e : agg.errors) err += (err.empty() ? "" : "; ") + e;
    for (std::size_t ki = 0; ki < ks.size(); ++ki) {
      ResultRow r;
      r.scenario = std::string(kAllScenarios);
      r.cov = cov;
      r.reserved_age = rr;
      r.hit_count = hh;
      r.kind = kind;
      r.frames = ks[ki];
      r.error = err;
      r.trials = static_cast<int>(agg.ok.size());
      if (r.trials > 0) {
        int n = 0;
        for (auto const& row : agg.ok) n += row[ki];
        r.success_rate = static_cast<double>(n) / r.trials;
      }
      r.mean_min_frames = mm;
      table.rows.push_back(std::move(r));
    }
  }

  std::sort(table.rows.begin(), table.rows.end(), row_less);
  return table;
}

namespace {

std::string csv_field(std::string const& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

}  // namespace

void ResultTable::write_csv(std::ostream& out) const {
  out << "# mothijack " << version << " seed " << seed << '\n';
  out << "scenario,cov,R,H,kind,frames,success_rate,mean_min_frames,trials,error\n";
  for (auto const& r : rows) {
    out << csv_field(r.scenario) << ',' << format_number(r.cov) << ',' << r.reserved_age << ','
        << r.hit_count << ',' << to_string(r.kind) << ',' << r.frames << ','
        << format_number(r.success_rate) << ','
        << (r.mean_min_frames ? format_number(*r.mean_min_frames) : "") << ',' << r.trials
        << ',' << csv_field(r.error) << '\n';
  }
}

namespace {

std::vector<std::string> split_csv(std::string const& line, int line_no) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char const c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  if (quoted) throw ParseError("unterminated quote", line_no);
  return out;
}

template <class T>
T csv_number(std::string const& s, int line_no) {
  T v{};
  auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("bad number '" + s + "'", line_no);
  }
  return v;
}

}  // namespace

ResultTable read_result_table(std::istream& in) {
  ResultTable t;
  std::string line;
  int line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream meta(line.substr(1));
      std::string tool, version, seed_word;
      std::uint64_t seed = 0;
      if (meta >> tool >> version >> seed_word >> seed && tool == "mothijack" && seed_word == "seed") {
        t.version = version;
        t.seed = seed;
      }
      continue;
    }
    if (!header) {
      if (line != "scenario,cov,R,H,kind,frames,success_rate,mean_min_frames,trials,error") {
        throw ParseError("unexpected table header", line_no);
      }
      header = true;
      continue;
    }
    auto const f = split_csv(line, line_no);
    if (f.size() != 10) throw ParseError("expected 10 fields", line_no);
    ResultRow r;
    r.scenario = f[0];
    r.cov = csv_number<double>(f[1], line_no);
    r.reserved_age = csv_number<int>(f[2], line_no);
    r.hit_count = csv_number<int>(f[3], line_no);
    try {
      r.kind = attack_kind_from(f[4]);
    } catch (std::invalid_argument const& e) {
      throw ParseError(e.what(), line_no);
    }
    r.frames = csv_number<int>(f[5], line_no);
    r.success_rate = csv_number<double>(f[6], line_no);
    if (!f[7].empty()) r.mean_min_frames = csv_number<double>(f[7], line_no);
    r.trials = csv_number<int>(f[8], line_no);
    r.error = f[9];
    t.rows.push_back(std::move(r));
  }
  if (!header) throw ParseError("missing table header", line_no);
  return t;
}

void ResultTable::write_plot_data(std::ostream& out) const {
  out << "# mothijack " << version << " seed " << seed << "\n# columns: frames success_rate\n";
  bool first = true;
  std::string current;
  for (auto const& r : rows) {
    if (r.scenario != kAllScenarios) continue;
    std::string const series = std::string(to_string(r.kind)) + " R=" +
                               std::to_string(r.reserved_age) + " H=" +
                               std::to_string(r.hit_count) + " cov=" + format_number(r.cov);
    if (series != current) {
      if (!first) out << "\n\n";
      first = false;
      current = series;
      out << "# " << series << '\n';
    }
    out << r.frames << ' ' << format_number(r.success_rate) << '\n';
  }
}

}  // namespace mothijack
