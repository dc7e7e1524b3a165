#include "coopsim/scenario_io.hpp"

#include <fstream>

#include <fmt/format.h>

namespace coopsim {

using nlohmann::json;

namespace {

json clusters_to_json(const std::optional<std::vector<int>>& cluster_of) {
  if (!cluster_of) return nullptr;
  json out = json::array();
  for (int k : *cluster_of) out.push_back(k + 1);
  return out;
}

std::optional<std::vector<int>> clusters_from_json(const json& obj) {
  if (!obj.contains("cluster_of") || obj.at("cluster_of").is_null()) return std::nullopt;
  std::vector<int> out;
  for (const auto& k : obj.at("cluster_of")) out.push_back(k.get<int>() - 1);
  return out;
}

json to_json(const CollisionParams& p) {
  return {
      {"n_users", p.n_users},
      {"q_user", p.q_user},
      {"q_relay", p.q_relay},
      {"p_user_dest", p.p_user_dest},
      {"p_user_relay", p.p_user_relay},
      {"p_relay_dest", p.p_relay_dest},
      {"cluster_of", clusters_to_json(p.cluster_of)},
  };
}

json to_json(const MprParams& p) {
  return {
      {"n_users", p.n_users},
      {"q_user", p.q_user},
      {"q_relay", p.q_relay},
      {"distance", p.distance},
      {"pathloss", p.pathloss},
      {"tx_power", p.tx_power},
      {"noise", p.noise},
      {"sinr_threshold", p.sinr_threshold},
      {"fading_param", p.fading_param},
      {"cluster_of", clusters_to_json(p.cluster_of)},
  };
}

CollisionParams collision_from_json(const json& o) {
  CollisionParams p;
  o.at("n_users").get_to(p.n_users);
  o.at("q_user").get_to(p.q_user);
  o.at("q_relay").get_to(p.q_relay);
  o.at("p_user_dest").get_to(p.p_user_dest);
  o.at("p_user_relay").get_to(p.p_user_relay);
  o.at("p_relay_dest").get_to(p.p_relay_dest);
  p.cluster_of = clusters_from_json(o);
  return p;
}

MprParams mpr_from_json(const json& o) {
  MprParams p;
  o.at("n_users").get_to(p.n_users);
  o.at("q_user").get_to(p.q_user);
  o.at("q_relay").get_to(p.q_relay);
  o.at("distance").get_to(p.distance);
  o.at("pathloss").get_to(p.pathloss);
  o.at("tx_power").get_to(p.tx_power);
  o.at("sinr_threshold").get_to(p.sinr_threshold);
  if (o.contains("noise"))
    o.at("noise").get_to(p.noise);
  else
    p.noise.fill(kDefaultNoiseWatts);
  if (o.contains("fading_param")) {
    o.at("fading_param").get_to(p.fading_param);
  } else {
    p.fading_param.assign(p.distance.size(), {});
    for (auto& row : p.fading_param) row.fill(kDefaultFadingParam);
  }
  p.cluster_of = clusters_from_json(o);
  return p;
}

}  // namespace

json to_json(const ScenarioConfig& config) {
  json doc = {
      {"channel", std::string(to_string(config.channel_kind()))},
      {"strategy", std::string(to_string(config.strategy))},
      {"horizon_slots", config.horizon_slots},
      {"warmup_slots", config.warmup_slots},
      {"seed", config.seed},
      {"replications", config.replications},
  };
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        doc[std::is_same_v<T, CollisionParams> ? "collision" : "mpr"] = to_json(p);
      },
      config.channel);
  return doc;
}

ScenarioConfig scenario_from_json(const json& doc) {
  try {
    ScenarioConfig config;
    const auto channel = doc.at("channel").get<std::string>();
    if (channel == "collision")
      config.channel = collision_from_json(doc.at("collision"));
    else if (channel == "mpr")
      config.channel = mpr_from_json(doc.at("mpr"));
    else
      throw ScenarioFormatError(fmt::format("channel: unknown channel model '{}'", channel));

    const auto strategy = doc.at("strategy").get<std::string>();
    const auto parsed = parse_strategy(strategy);
    if (!parsed) throw ScenarioFormatError(fmt::format("strategy: unknown strategy '{}'", strategy));
    config.strategy = *parsed;
    doc.at("horizon_slots").get_to(config.horizon_slots);
    doc.at("warmup_slots").get_to(config.warmup_slots);
    doc.at("seed").get_to(config.seed);
    doc.at("replications").get_to(config.replications);
    return config;
  } catch (const json::exception& e) {
    throw ScenarioFormatError(e.what());
  }
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioIoError(fmt::format("cannot open scenario file {}", path.string()));
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ScenarioFormatError(fmt::format("{}: {}", path.string(), e.what()));
  }
  return scenario_from_json(doc);
}

void save_scenario(const ScenarioConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ScenarioIoError(fmt::format("cannot write {}", path.string()));
  out << to_json(config).dump(2) << '\n';
}

}  // namespace coopsim
