#pragma once

#include "steer/game.hpp"

#include <string>

namespace steer {

// JSON game files. See docs/game_format.md for the schema. Payoffs are stored
// raw together with the normalization record.
std::string game_to_json(const GameTree& game, int indent = -1);
// Throws GameError when the file is malformed or fails validate().
GameTree game_from_json(const std::string& text);
GameTree load_game(const std::string& path);
void save_game(const GameTree& game, const std::string& path);

}  // namespace steer
