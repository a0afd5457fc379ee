#include "patsim/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "patsim/error.hpp"

namespace patsim {

namespace {

using json = nlohmann::ordered_json;

const Days kFirstDay = days_from_civil(1976, 1, 1);
const Days kLastDay = days_from_civil(2021, 9, 30);

struct Topic {
  char section;
  std::uint8_t class_num;
  char subclass;
  std::vector<std::uint32_t> main_groups;
};

constexpr std::uint32_t kSubGroups[] = {0, 2, 4, 6, 8, 10};

std::string pad_id(const char* prefix, std::size_t value, std::size_t width) {
  std::string digits = std::to_string(value);
  if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
  return prefix + digits;
}

std::vector<Topic> make_topics(std::mt19937_64& rng, std::size_t count) {
  std::set<std::tuple<char, int, char>> used;
  std::vector<Topic> topics;
  std::uniform_int_distribution<int> section(0, 7), cls(1, 99), sub(0, 25), groups(3, 8), group_no(1, 60);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (topics.size() < count) {
    Topic t{static_cast<char>('A' + section(rng)), static_cast<std::uint8_t>(cls(rng)),
            static_cast<char>('A' + sub(rng)), {}};
    // Most classes hold several subclasses.
    if (!topics.empty() && unit(rng) < 0.6) {
      const Topic& sibling = topics[std::uniform_int_distribution<std::size_t>(0, topics.size() - 1)(rng)];
      t.section = sibling.section;
      t.class_num = sibling.class_num;
    }
    if (!used.insert({t.section, t.class_num, t.subclass}).second) continue;
    std::set<std::uint32_t> mg;
    const int n_groups = groups(rng);
    while (static_cast<int>(mg.size()) < n_groups) mg.insert(static_cast<std::uint32_t>(group_no(rng)));
    t.main_groups.assign(mg.begin(), mg.end());
    topics.push_back(std::move(t));
  }
  return topics;
}

ipc::IpcCode draw_code(std::mt19937_64& rng, const Topic& topic) {
  std::uniform_int_distribution<std::size_t> g(0, topic.main_groups.size() - 1);
  std::uniform_int_distribution<std::size_t> s(0, std::size(kSubGroups) - 1);
  return {topic.section, topic.class_num, topic.subclass, topic.main_groups[g(rng)], kSubGroups[s(rng)]};
}

json shape_to_json(const SmoothShape& s) {
  return json{{"lo", s.lo},         {"hi", s.hi},       {"slope", s.slope},
              {"amplitude", s.amplitude}, {"frequency", s.frequency}, {"phase", s.phase},
              {"decay", s.decay},   {"decay_rate", s.decay_rate}};
}

SmoothShape shape_from_json(const json& j) {
  SmoothShape s;
  s.lo = j.at("lo").get<double>();
  s.hi = j.at("hi").get<double>();
  s.slope = j.at("slope").get<double>();
  s.amplitude = j.at("amplitude").get<double>();
  s.frequency = j.at("frequency").get<double>();
  s.phase = j.at("phase").get<double>();
  s.decay = j.at("decay").get<double>();
  s.decay_rate = j.at("decay_rate").get<double>();
  return s;
}

}  // namespace

double SmoothShape::operator()(double x) const {
  const double width = hi - lo;
  double z = width > 0 ? (x - lo) / width : 0.0;
  z = std::clamp(z, 0.0, 1.0);
  return slope * z + amplitude * std::sin(2.0 * std::numbers::pi * frequency * z + phase) +
         decay * std::exp(-decay_rate * z);
}

SynthProfile SynthProfile::standard() {
  SynthProfile p;
  const double span = static_cast<double>(kLastDay - kFirstDay);
  p.pub_date = {.lo = 0.0, .hi = span, .slope = -4.0, .amplitude = 2.5, .frequency = 1.0};
  p.temporal_lag = {.lo = 0.0, .hi = span, .slope = -2.0, .decay = 6.0, .decay_rate = 6.0};
  p.log_citations = {.lo = 0.0, .hi = std::log(300.0), .slope = -5.0, .amplitude = 1.0, .frequency = 0.75};
  p.same_org = 8.0;
  p.sender_org = -1.2;
  p.receiver_org = 0.0;
  p.jaccard = {2.248, 1.901, 2.497, 3.639, 4.168};
  return p;
}

SynthProfile SynthProfile::null_effects() {
  SynthProfile p;
  const double span = static_cast<double>(kLastDay - kFirstDay);
  p.pub_date = {.lo = 0.0, .hi = span};
  p.temporal_lag = {.lo = 0.0, .hi = span};
  p.log_citations = {.lo = 0.0, .hi = std::log(300.0)};
  return p;
}

SynthCorpus synth_corpus(std::uint64_t seed, std::size_t n_patents, std::size_t n_edges, const SynthProfile& profile) {
  if (n_edges > 0 && n_patents < 2)
    throw ValidationError("synth: n_edges > 0 requires at least 2 patents");
  if (n_patents > 0 && n_edges > n_patents * (n_patents - 1))
    throw ValidationError("synth: n_edges exceeds the number of distinct ordered pairs");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Dates, denser towards the end of the window, assigned in id order.
  std::vector<Days> dates(n_patents);
  const double span = static_cast<double>(kLastDay - kFirstDay);
  for (Days& d : dates) d = kFirstDay + static_cast<Days>(std::floor(span * std::pow(unit(rng), 0.7)));
  std::sort(dates.begin(), dates.end());

  const std::vector<Topic> topics = make_topics(rng, std::clamp<std::size_t>(n_patents / 60, 8, 400));
  const std::size_t n_orgs = std::max<std::size_t>(5, n_patents / 25);
  const std::size_t width = std::to_string(std::max<std::size_t>(n_patents, 1)).size();

  SynthCorpus out;
  out.profile = profile;
  out.seed = seed;

  std::vector<std::size_t> topic_of(n_patents);
  std::vector<std::vector<std::size_t>> by_topic(topics.size());
  std::vector<std::vector<std::size_t>> by_org(n_orgs);
  std::vector<std::ptrdiff_t> org_of(n_patents, -1);
  std::uniform_int_distribution<std::size_t> pick_topic(0, topics.size() - 1);

  for (std::size_t i = 0; i < n_patents; ++i) {
    PatentRecord p;
    p.patent_id = pad_id("P", i + 1, width);
    p.grant_date = dates[i];
    p.abstract_text = unit(rng) < 0.01 ? "" : "Synthetic abstract for patent " + p.patent_id + ".";
    p.is_utility = unit(rng) >= 0.03;

    const std::size_t topic = pick_topic(rng);
    topic_of[i] = topic;
    by_topic[topic].push_back(i);
    if (unit(rng) >= 0.01) {
      const double r = unit(rng);
      const int n_codes = r < 0.6 ? 1 : (r < 0.85 ? 2 : 3);
      std::set<ipc::IpcCode> codes{draw_code(rng, topics[topic])};
      for (int k = 1; k < n_codes; ++k)
        codes.insert(draw_code(rng, unit(rng) < 0.6 ? topics[topic] : topics[pick_topic(rng)]));
      p.ipc_codes.assign(codes.begin(), codes.end());
    }

    const double k = unit(rng);
    if (k < 0.7) {
      const auto org = static_cast<std::size_t>(static_cast<double>(n_orgs) * unit(rng) * unit(rng));
      p.assignee_kind = AssigneeKind::Organization;
      p.assignee_id = pad_id("ORG", org + 1, 5);
      org_of[i] = static_cast<std::ptrdiff_t>(org);
      by_org[org].push_back(i);
    } else if (k < 0.9) {
      p.assignee_kind = AssigneeKind::Individual;
      p.assignee_id = pad_id("IND", i + 1, width);
    }
    out.corpus.add_patent(std::move(p));
  }

  if (n_edges == 0) return out;

  // Heavy-tailed citing propensity gives a wide spread of out-degrees.
  std::lognormal_distribution<double> propensity(0.0, 0.9);
  std::vector<double> weights(n_patents);
  for (double& w : weights) w = propensity(rng);
  std::discrete_distribution<std::size_t> pick_sender(weights.begin(), weights.end());
  std::exponential_distribution<double> lag_days(1.0 / 2500.0);
  std::uniform_int_distribution<std::size_t> any(0, n_patents - 1);

  // Latest member of `pool` (sorted by date) granted on or before `target`,
  // restricted to members granted no later than patent `limit`.
  auto pick_before = [&](const std::vector<std::size_t>& pool, std::size_t limit, double target) -> std::ptrdiff_t {
    auto end = std::upper_bound(pool.begin(), pool.end(), limit);
    if (end == pool.begin()) return -1;
    auto it = std::upper_bound(pool.begin(), end, target,
                               [&](double t, std::size_t idx) { return t < static_cast<double>(dates[idx]); });
    if (it == pool.begin()) {
      std::uniform_int_distribution<std::size_t> u(0, static_cast<std::size_t>(end - pool.begin()) - 1);
      return static_cast<std::ptrdiff_t>(pool[u(rng)]);
    }
    return static_cast<std::ptrdiff_t>(*(it - 1));
  };

  std::vector<std::size_t> everyone(n_patents);
  for (std::size_t i = 0; i < n_patents; ++i) everyone[i] = i;

  std::unordered_set<std::uint64_t> seen;
  seen.reserve(n_edges * 2);
  const auto pair_key = [&](std::size_t s, std::size_t r) { return static_cast<std::uint64_t>(s) * n_patents + r; };
  const auto& patents = out.corpus.patents();
  auto emit = [&](std::size_t s, std::size_t r) {
    out.corpus.add_edge_unchecked({patents[s].patent_id, patents[r].patent_id});
  };

  std::size_t made = 0;
  const std::size_t max_attempts = 50 * n_edges;
  for (std::size_t attempt = 0; made < n_edges && attempt < max_attempts; ++attempt) {
    const std::size_t s = pick_sender(rng);
    const double target = static_cast<double>(dates[s]) - lag_days(rng);
    std::ptrdiff_t r = -1;
    const double mode = unit(rng);
    if (mode < 0.03) {
      r = static_cast<std::ptrdiff_t>(any(rng));
    } else if (mode < 0.15 && org_of[s] >= 0) {
      r = pick_before(by_org[static_cast<std::size_t>(org_of[s])], s, target);
    } else if (mode < 0.6) {
      r = pick_before(by_topic[topic_of[s]], s, target);
    }
    if (r < 0) r = pick_before(everyone, s, target);
    if (r < 0 || static_cast<std::size_t>(r) == s) continue;
    if (!seen.insert(pair_key(s, static_cast<std::size_t>(r))).second) continue;
    emit(s, static_cast<std::size_t>(r));
    ++made;
  }
  // Dense requests can exhaust random sampling; fill the rest in pair order.
  for (std::size_t s = 0; made < n_edges && s < n_patents; ++s)
    for (std::size_t r = 0; made < n_edges && r < n_patents; ++r)
      if (r != s && seen.insert(pair_key(s, r)).second) {
        emit(s, r);
        ++made;
      }
  return out;
}

std::string ground_truth_json(const SynthCorpus& synth) {
  const SynthProfile& p = synth.profile;
  json j;
  j["seed"] = synth.seed;
  j["n_patents"] = synth.corpus.patents().size();
  j["n_edges"] = synth.corpus.edges().size();
  j["response"] =
      "intercept + f_pub_date(pub_date) + f_lag(temporal_diff_days) + f_cites(log_sender_citations) + "
      "same_org*is_same_org + sender_org*is_sender_org + receiver_org*is_receiver_org + "
      "sum(jaccard[k]*j_k) + N(0, noise_sd^2), clamped to [-100, 100]";
  j["smooth_form"] = "slope*z + amplitude*sin(2*pi*frequency*z + phase) + decay*exp(-decay_rate*z), z=(x-lo)/(hi-lo)";
  json prof;
  prof["intercept"] = p.intercept;
  prof["noise_sd"] = p.noise_sd;
  prof["same_org"] = p.same_org;
  prof["sender_org"] = p.sender_org;
  prof["receiver_org"] = p.receiver_org;
  prof["jaccard"] = {{"section", p.jaccard[0]},   {"class", p.jaccard[1]},    {"subclass", p.jaccard[2]},
                     {"maingroup", p.jaccard[3]}, {"subgroup", p.jaccard[4]}};
  prof["smooths"] = {{"pub_date", shape_to_json(p.pub_date)},
                     {"temporal_diff_days", shape_to_json(p.temporal_lag)},
                     {"log_sender_citations", shape_to_json(p.log_citations)}};
  j["profile"] = std::move(prof);
  return j.dump(2) + "\n";
}

void write_ground_truth(const std::filesystem::path& path, const SynthCorpus& synth) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << ground_truth_json(synth);
}

GroundTruth read_ground_truth(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read ground truth " + path.string());
  try {
    const json j = json::parse(in);
    const json& prof = j.at("profile");
    GroundTruth gt;
    gt.seed = j.at("seed").get<std::uint64_t>();
    gt.profile.intercept = prof.at("intercept").get<double>();
    gt.profile.noise_sd = prof.at("noise_sd").get<double>();
    gt.profile.same_org = prof.at("same_org").get<double>();
    gt.profile.sender_org = prof.at("sender_org").get<double>();
    gt.profile.receiver_org = prof.at("receiver_org").get<double>();
    const json& jac = prof.at("jaccard");
    gt.profile.jaccard = {jac.at("section").get<double>(), jac.at("class").get<double>(),
                          jac.at("subclass").get<double>(), jac.at("maingroup").get<double>(),
                          jac.at("subgroup").get<double>()};
    const json& sm = prof.at("smooths");
    gt.profile.pub_date = shape_from_json(sm.at("pub_date"));
    gt.profile.temporal_lag = shape_from_json(sm.at("temporal_diff_days"));
    gt.profile.log_citations = shape_from_json(sm.at("log_sender_citations"));
    return gt;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("ground truth " + path.string() + ": " + e.what());
  }
}

}  // namespace patsim
