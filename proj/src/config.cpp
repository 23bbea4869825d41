#include "polling/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "polling/errors.hpp"

namespace polling {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
  throw Error(Errc::ParseError, origin + ": " + what);
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& origin, const std::string& path) {
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key))
      fail(origin, path + ": unknown key \"" + key + "\"");
}

const json& need(const json& obj, const char* key, const std::string& origin,
                 const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(origin, path + ": missing key \"" + key + "\"");
  return *it;
}

double need_number(const json& obj, const char* key, const std::string& origin,
                   const std::string& path) {
  const json& v = need(obj, key, origin, path);
  if (!v.is_number()) fail(origin, path + "." + key + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(origin, path + "." + key + ": must be finite");
  return x;
}

std::int64_t need_integer(const json& obj, const char* key, const std::string& origin,
                          const std::string& path) {
  const json& v = need(obj, key, origin, path);
  if (!v.is_number_integer()) fail(origin, path + "." + key + ": expected an integer");
  return v.get<std::int64_t>();
}

}  // namespace

DistributionSpec dist_from_json(const json& j, const std::string& where) {
  const std::string origin = where;
  if (!j.is_object()) fail(origin, "expected a distribution object");
  const json& kind = need(j, "dist", origin, "");
  if (!kind.is_string()) fail(origin, "dist: expected a string");
  const std::string name = kind.get<std::string>();

  DistributionSpec s;
  if (name == "deterministic") {
    reject_unknown_keys(j, {"dist", "value"}, origin, "");
    s = DistributionSpec::deterministic(need_number(j, "value", origin, ""));
  } else if (name == "uniform") {
    reject_unknown_keys(j, {"dist", "mean"}, origin, "");
    s = DistributionSpec::uniform_by_mean(need_number(j, "mean", origin, ""));
  } else if (name == "exponential") {
    reject_unknown_keys(j, {"dist", "mean"}, origin, "");
    s = DistributionSpec::exponential(need_number(j, "mean", origin, ""));
  } else if (name == "pareto") {
    reject_unknown_keys(j, {"dist", "xmin", "shape"}, origin, "");
    s = DistributionSpec::pareto(need_number(j, "xmin", origin, ""),
                                 need_number(j, "shape", origin, ""));
  } else if (name == "weibull") {
    reject_unknown_keys(j, {"dist", "shape", "mean"}, origin, "");
    s = DistributionSpec::weibull(need_number(j, "shape", origin, ""),
                                  need_number(j, "mean", origin, ""));
  } else if (name == "two_point") {
    reject_unknown_keys(j, {"dist", "x1", "p1", "x2"}, origin, "");
    s = DistributionSpec::two_point(need_number(j, "x1", origin, ""),
                                    need_number(j, "p1", origin, ""),
                                    need_number(j, "x2", origin, ""));
  } else {
    fail(origin, "dist: unknown family \"" + name +
                     "\" (expected deterministic, uniform, exponential, pareto, "
                     "weibull, or two_point)");
  }

  const auto problems = spec_violations(s);
  if (!problems.empty()) {
    std::string msg = origin + ":";
    for (const auto& p : problems) msg += " " + p + ";";
    msg.pop_back();
    throw Error(Errc::ParseError, msg);
  }
  return s;
}

json dist_to_json(const DistributionSpec& s) {
  json j;
  switch (s.kind) {
    case DistKind::Deterministic:
      j["dist"] = "deterministic";
      j["value"] = s.value;
      break;
    case DistKind::UniformByMean:
      j["dist"] = "uniform";
      j["mean"] = s.mean;
      break;
    case DistKind::Exponential:
      j["dist"] = "exponential";
      j["mean"] = s.mean;
      break;
    case DistKind::ParetoDensity:
      j["dist"] = "pareto";
      j["xmin"] = s.xmin;
      j["shape"] = s.shape;
      break;
    case DistKind::Weibull:
      j["dist"] = "weibull";
      j["shape"] = s.shape;
      j["mean"] = s.mean;
      break;
    case DistKind::TwoPoint:
      j["dist"] = "two_point";
      j["x1"] = s.x1;
      j["p1"] = s.p1;
      j["x2"] = s.x2;
      break;
  }
  return j;
}

json parse_document(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::ParseError, origin + ": " + e.what());
  }
}

Config config_from_document(const json& doc, const std::string& origin) {
  if (!doc.is_object()) fail(origin, "top level: expected an object");
  reject_unknown_keys(doc, {"queues", "switchover", "discipline", "run"}, origin,
                      "top level");

  Config cfg;

  // discipline
  const json& disc = need(doc, "discipline", origin, "top level");
  if (!disc.is_string()) fail(origin, "discipline: expected a string");
  const std::string dname = disc.get<std::string>();
  if (dname == "limited")
    cfg.model.discipline = Discipline::Limited;
  else if (dname == "gated")
    cfg.model.discipline = Discipline::Gated;
  else if (dname == "exhaustive")
    cfg.model.discipline = Discipline::Exhaustive;
  else
    fail(origin, "discipline: unknown value \"" + dname +
                     "\" (expected limited, gated, or exhaustive)");

  // queues
  const json& queues = need(doc, "queues", origin, "top level");
  if (!queues.is_array() || queues.size() != 3)
    fail(origin, "queues: expected an array of exactly 3 queue objects");
  for (int k = 0; k < 3; ++k) {
    const json& q = queues[k];
    const std::string path = "queues[" + std::to_string(k) + "]";
    if (!q.is_object()) fail(origin, path + ": expected an object");
    reject_unknown_keys(q, {"interarrival", "service", "limit", "saturated"}, origin, path);
    QueueParams& qp = cfg.model.queue[k];

    if (auto it = q.find("saturated"); it != q.end()) {
      if (!it->is_boolean()) fail(origin, path + ".saturated: expected a boolean");
      qp.saturated = it->get<bool>();
    }
    if (auto it = q.find("interarrival"); it != q.end()) {
      qp.interarrival = dist_from_json(*it, origin + ": " + path + ".interarrival");
    } else if (!qp.saturated) {
      fail(origin, path + ": missing key \"interarrival\" (required unless saturated)");
    } else {
      qp.interarrival = DistributionSpec::deterministic(1);  // ignored at saturated queues
    }
    qp.service = dist_from_json(need(q, "service", origin, path),
                                origin + ": " + path + ".service");
    if (auto it = q.find("limit"); it != q.end()) {
      if (!it->is_number_integer()) fail(origin, path + ".limit: expected an integer");
      const std::int64_t l = it->get<std::int64_t>();
      if (l < 1 || l > 1'000'000'000) fail(origin, path + ".limit: must be in [1, 1e9]");
      qp.limit = static_cast<int>(l);
    }
  }

  // switchover legs
  const json& sw = need(doc, "switchover", origin, "top level");
  if (!sw.is_object()) fail(origin, "switchover: expected an object");
  reject_unknown_keys(sw, {"s12", "s23", "s31", "s13"}, origin, "switchover");
  const char* leg_keys[4] = {"s12", "s23", "s31", "s13"};
  const int leg_index[4] = {kLeg12, kLeg23, kLeg31, kLeg13};
  for (int i = 0; i < 4; ++i)
    cfg.model.switchover[leg_index[i]] =
        dist_from_json(need(sw, leg_keys[i], origin, "switchover"),
                       origin + ": switchover." + leg_keys[i]);

  // run spec
  if (auto it = doc.find("run"); it != doc.end()) {
    const json& run = *it;
    if (!run.is_object()) fail(origin, "run: expected an object");
    reject_unknown_keys(run, {"cycles", "warmup", "seed", "replications"}, origin, "run");
    if (run.contains("cycles")) {
      cfg.run.cycles = need_integer(run, "cycles", origin, "run");
      if (cfg.run.cycles < 1) fail(origin, "run.cycles: must be at least 1");
    }
    if (run.contains("warmup")) {
      cfg.run.warmup = need_integer(run, "warmup", origin, "run");
      if (cfg.run.warmup < 0) fail(origin, "run.warmup: must be >= 0");
      if (cfg.run.warmup >= cfg.run.cycles)
        fail(origin, "run.warmup: must be smaller than run.cycles");
    }
    if (run.contains("seed")) {
      const json& s = run["seed"];
      if (!s.is_number_integer())
        fail(origin, "run.seed: expected an integer");
      if (s.is_number_unsigned())
        cfg.run.seed = s.get<std::uint64_t>();
      else {
        const std::int64_t v = s.get<std::int64_t>();
        if (v < 0) fail(origin, "run.seed: must be non-negative");
        cfg.run.seed = static_cast<std::uint64_t>(v);
      }
    }
    if (run.contains("replications")) {
      const std::int64_t r = need_integer(run, "replications", origin, "run");
      if (r < 1 || r > 10000) fail(origin, "run.replications: must be in [1, 10000]");
      cfg.run.replications = static_cast<int>(r);
    }
  }

  // model-level validation; hard problems throw, soft ones ride along
  auto problems = validate(cfg.model);
  if (has_errors(problems))
    throw Error(Errc::InvalidParams, origin + ": " + describe(problems));
  cfg.warnings = std::move(problems);
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw Error(Errc::ParseError, path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_document(parse_document(buf.str(), path), path);
}

json config_to_json(const Config& c) {
  json q = json::array();
  for (int k = 0; k < 3; ++k) {
    json one;
    one["interarrival"] = dist_to_json(c.model.queue[k].interarrival);
    one["service"] = dist_to_json(c.model.queue[k].service);
    one["limit"] = c.model.queue[k].limit;
    one["saturated"] = c.model.queue[k].saturated;
    q.push_back(one);
  }
  json sw;
  sw["s12"] = dist_to_json(c.model.switchover[kLeg12]);
  sw["s23"] = dist_to_json(c.model.switchover[kLeg23]);
  sw["s31"] = dist_to_json(c.model.switchover[kLeg31]);
  sw["s13"] = dist_to_json(c.model.switchover[kLeg13]);

  const char* dname = c.model.discipline == Discipline::Limited    ? "limited"
                      : c.model.discipline == Discipline::Gated    ? "gated"
                                                                   : "exhaustive";
  json run;
  run["cycles"] = c.run.cycles;
  if (c.run.warmup >= 0) run["warmup"] = c.run.warmup;
  run["seed"] = c.run.seed;
  run["replications"] = c.run.replications;

  json doc;
  doc["queues"] = q;
  doc["switchover"] = sw;
  doc["discipline"] = dname;
  doc["run"] = run;
  return doc;
}

}  // namespace polling
