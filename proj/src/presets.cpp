#include "spectrasort/synthgen.hpp"

// Synthetic stand-ins. Line positions loosely echo strong visible lines of
// each element; strengths and fractions are tuned only to give the twelve
// classes a cluster structure: Co marks one cluster, W-free Cr-rich steels
// another, and alloys within a cluster differ by a few tens of percent in
// W, Mo, V or Cr. None of it is reference data. data/catalog.txt and
// data/compositions.txt carry the same numbers.

namespace spectrasort {

ElementLineCatalog default_catalog() {
  ElementLineCatalog cat;
  cat.lines = {
      {"Fe", {{358.1, 0.25}, {371.9, 0.30}, {385.9, 0.20}, {404.6, 0.20}, {438.4, 0.25}, {527.0, 0.15}}},
      {"Cr", {{425.4, 1.00}, {427.5, 0.90}, {429.0, 0.70}, {520.8, 0.60}, {540.9, 0.40}}},
      {"W", {{400.9, 1.00}, {407.4, 0.80}, {429.5, 0.60}, {484.4, 0.40}, {505.3, 0.50}}},
      {"Mo", {{379.8, 1.00}, {386.4, 0.90}, {390.3, 0.80}, {550.6, 0.50}, {553.3, 0.60}, {557.0, 0.40}}},
      {"V", {{411.2, 0.80}, {437.9, 1.00}, {440.8, 0.70}, {625.0, 0.30}}},
      {"Co", {{399.5, 0.70}, {412.1, 1.00}, {453.1, 0.80}, {460.3, 0.50}}},
      {"C", {{426.7, 1.00}, {514.5, 0.60}, {658.3, 0.80}}},
      {"Si", {{390.6, 1.00}, {634.7, 0.60}, {637.1, 0.50}}},
      {"Mn", {{403.1, 1.00}, {476.2, 0.60}, {482.4, 0.50}}},
      {"Ni", {{352.5, 1.00}, {361.9, 0.80}, {547.7, 0.50}}},
  };
  return cat;
}

std::vector<AlloyComposition> default_compositions() {
  // Weight fractions, iron balance listed explicitly.
  return {
      {"M1", {{"C", 0.009}, {"Cr", 0.0389}, {"Fe", 0.814}, {"Mn", 0.003}, {"Mo", 0.0645}, {"Si", 0.003}, {"V", 0.0146}, {"W", 0.053}}},
      {"M2", {{"C", 0.009}, {"Cr", 0.0417}, {"Fe", 0.7986}, {"Mn", 0.003}, {"Mo", 0.0505}, {"Si", 0.003}, {"V", 0.0202}, {"W", 0.074}}},
      {"T1", {{"C", 0.009}, {"Cr", 0.0403}, {"Fe", 0.7916}, {"Mn", 0.003}, {"Mo", 0.0365}, {"Si", 0.003}, {"V", 0.0146}, {"W", 0.102}}},
      {"P9", {{"C", 0.009}, {"Cr", 0.0501}, {"Fe", 0.7818}, {"Mn", 0.003}, {"Mo", 0.0435}, {"Si", 0.003}, {"V", 0.0286}, {"W", 0.081}}},
      {"M35", {{"C", 0.01}, {"Co", 0.0652}, {"Cr", 0.04}, {"Fe", 0.75272}, {"Mn", 0.003}, {"Mo", 0.0624}, {"Si", 0.003}, {"V", 0.01528}, {"W", 0.0484}}},
      {"M36", {{"C", 0.01}, {"Co", 0.0862}, {"Cr", 0.04}, {"Fe", 0.73312}, {"Mn", 0.003}, {"Mo", 0.0484}, {"Si", 0.003}, {"V", 0.02088}, {"W", 0.0554}}},
      {"M42", {{"C", 0.01}, {"Co", 0.0792}, {"Cr", 0.04}, {"Fe", 0.74292}, {"Mn", 0.003}, {"Mo", 0.0834}, {"Si", 0.003}, {"V", 0.01108}, {"W", 0.0274}}},
      {"T4", {{"C", 0.01}, {"Co", 0.0722}, {"Cr", 0.04}, {"Fe", 0.74152}, {"Mn", 0.003}, {"Mo", 0.0414}, {"Si", 0.003}, {"V", 0.01248}, {"W", 0.0764}}},
      {"T42", {{"C", 0.01}, {"Co", 0.1072}, {"Cr", 0.04}, {"Fe", 0.71072}, {"Mn", 0.003}, {"Mo", 0.0344}, {"Si", 0.003}, {"V", 0.02928}, {"W", 0.0624}}},
      {"D2", {{"C", 0.01667}, {"Cr", 0.098}, {"Fe", 0.85153}, {"Mn", 0.003}, {"Mo", 0.01467}, {"Ni", 0.003}, {"Si", 0.003}, {"V", 0.01013}}},
      {"H10", {{"C", 0.002667}, {"Cr", 0.049}, {"Fe", 0.90753}, {"Mn", 0.003}, {"Mo", 0.02587}, {"Ni", 0.003}, {"Si", 0.003}, {"V", 0.005933}}},
      {"H13", {{"C", 0.002667}, {"Cr", 0.063}, {"Fe", 0.885263}, {"Mn", 0.003}, {"Mo", 0.01747}, {"Ni", 0.003}, {"Si", 0.01267}, {"V", 0.01293}}},
  };
}

}  // namespace spectrasort
