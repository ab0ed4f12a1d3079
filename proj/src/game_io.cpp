#include "steer/game_io.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <fstream>
#include <sstream>

namespace steer {

using nlohmann::json;

namespace {

json node_json(const GameTree& game, int h) {
  const Node& node = game.node(h);
  json j;
  switch (node.kind) {
    case NodeKind::kTerminal: {
      j["type"] = "terminal";
      std::vector<double> raw;
      for (Player i = 0; i < game.num_players(); ++i)
        raw.push_back(game.normalization().raw(game.utility(node.terminal, i)));
      j["utilities"] = raw;
      return j;
    }
    case NodeKind::kChance:
      j["type"] = "chance";
      j["actions"] = node.chance_actions;
      j["probs"] = node.chance;
      break;
    case NodeKind::kDecision:
      j["type"] = "decision";
      j["player"] = node.player;
      j["infoset"] = game.infoset(node.infoset).key;
      j["actions"] = game.infoset(node.infoset).actions;
      break;
  }
  json children = json::array();
  for (int c : node.children) children.push_back(node_json(game, c));
  j["children"] = std::move(children);
  return j;
}

void add_node(GameBuilder& b, const json& j, GameBuilder::Edge at) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "terminal") {
    b.terminal(at, j.at("utilities").get<std::vector<double>>());
    return;
  }
  int id = -1;
  if (type == "chance") {
    id = b.chance(at, j.at("actions").get<std::vector<std::string>>(),
                  j.at("probs").get<std::vector<double>>());
  } else if (type == "decision") {
    id = b.decision(at, j.at("player").get<int>(), j.at("infoset").get<std::string>(),
                    j.at("actions").get<std::vector<std::string>>());
  } else {
    throw GameError(fmt::format("unknown node type '{}'", type));
  }
  const json& children = j.at("children");
  for (std::size_t a = 0; a < children.size(); ++a)
    add_node(b, children[a], {id, static_cast<int>(a)});
}

}  // namespace

std::string game_to_json(const GameTree& game, int indent) {
  json j;
  j["name"] = game.name();
  j["players"] = game.num_players();
  j["normalization"] = {{"scale", game.normalization().scale},
                        {"offset", game.normalization().offset}};
  j["root"] = node_json(game, 0);
  return j.dump(indent);
}

GameTree game_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw GameError(fmt::format("game file: {}", e.what()));
  }
  try {
    GameBuilder b(j.at("players").get<int>(), j.value("name", std::string("game")));
    if (j.contains("normalization"))
      b.set_normalization({j["normalization"].at("scale").get<double>(),
                           j["normalization"].at("offset").get<double>()});
    add_node(b, j.at("root"), GameBuilder::kRoot);
    GameTree g = std::move(b).build();
    const auto violations = validate(g);
    if (!violations.empty())
      throw GameError(fmt::format("game file rejected: {}", violations.front()));
    return g;
  } catch (const json::exception& e) {
    throw GameError(fmt::format("game file: {}", e.what()));
  }
}

GameTree load_game(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GameError(fmt::format("cannot open {}", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return game_from_json(ss.str());
}

void save_game(const GameTree& game, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw GameError(fmt::format("cannot write {}", path));
  out << game_to_json(game, 1) << '\n';
}

}  // namespace steer
