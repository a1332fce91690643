#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cluttergrasp/grasp/seal.hpp"
#include "cluttergrasp/scene/scene.hpp"

namespace cluttergrasp {

/// One suction corner-case fixture with its fixed candidate (1.5 cm cup).
struct CornerCase {
  std::string name;         // "a_grooves_holes", ...
  std::string description;
  Scene scene;
  AssetLibrary assets;
  SuctionCandidate candidate;
  SealFailure expected_failure = SealFailure::None;  // for the 960-vertex model
  bool expected_dexnet8 = false;                     // singulated 8-vertex model
};

/// The six fixtures:
///  a  10 mm plate, 6 x 5 mm groove at 22.5 deg through the centre, 3 mm through-hole at the centre
///  b  4 mm tall block under one perimeter vertex
///  c  sinusoidal roughness, 3 mm amplitude, nodes on every 45 deg perimeter vertex
///  d  neighbour 0.5 mm beyond the target edge, which sits 14 mm from the cup centre
///  e  spherical dish, radius 20 mm, 8 mm deep, cup at the bottom
///  f  3 mm plate lying on the target over half of the cup
std::vector<CornerCase> build_corner_cases();

/// Writes assets/ (OBJ + manifest.json), scenes/<name>.json and candidates.ndjson under `out`.
/// Throws ValidationError when the directory cannot be written.
void gen_corner_corpus(const std::filesystem::path& out);

}  // namespace cluttergrasp
