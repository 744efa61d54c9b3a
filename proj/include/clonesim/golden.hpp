// Reference values for the detector tables, with the tolerances they are
// checked against.
#pragma once

#include <array>
#include <string>
#include <vector>

#include "clonesim/detectors.hpp"

namespace clonesim {

struct GoldenTolerance {
  double fidelity = 0.002;
  double p_success = 0.005;
};

struct GoldenCell {
  double p_success, f1, f2;
};

// x is eta for the efficiency table and zeta for the dark-count table.
struct GoldenRow {
  double x;
  GoldenCell counter;
  GoldenCell on_off;
};

struct GoldenTable {
  std::string name;
  std::string variable;
  double gamma2 = 0.01;
  GoldenTolerance tolerance;
  std::vector<GoldenRow> rows;
};

inline const GoldenTable& golden_table1() {
  static const GoldenTable t{"table1",
                             "eta",
                             0.01,
                             {0.002, 0.005},
                             {
                                 {1.00, {0.2552, 0.8594, 0.8594}, {0.2598, 0.8567, 0.8569}},
                                 {0.90, {0.1357, 0.8591, 0.8592}, {0.1387, 0.8562, 0.8564}},
                                 {0.80, {0.0671, 0.8588, 0.8589}, {0.0688, 0.8555, 0.8558}},
                                 {0.70, {0.0302, 0.8583, 0.8584}, {0.0311, 0.8548, 0.8551}},
                                 {0.60, {0.0120, 0.8576, 0.8578}, {0.0124, 0.8540, 0.8543}},
                                 {0.50, {0.0041, 0.8567, 0.8569}, {0.0042, 0.8531, 0.8534}},
                                 {0.40, {0.0011, 0.8555, 0.8558}, {0.0011, 0.8521, 0.8524}},
                                 {0.30, {0.0002, 0.8540, 0.8543}, {0.0002, 0.8510, 0.8513}},
                             }};
  return t;
}

inline const GoldenTable& golden_table2() {
  static const GoldenTable t{"table2",
                             "zeta",
                             0.01,
                             {0.002, 0.005},
                             {
                                 {1e-6, {0.2552, 0.8594, 0.8594}, {0.2598, 0.8567, 0.8569}},
                                 {1e-5, {0.2552, 0.8594, 0.8594}, {0.2598, 0.8567, 0.8569}},
                                 {1e-4, {0.2550, 0.8589, 0.8589}, {0.2598, 0.8566, 0.8568}},
                                 {1e-3, {0.2536, 0.8543, 0.8543}, {0.2600, 0.8557, 0.8559}},
                                 {1e-2, {0.2403, 0.8094, 0.8094}, {0.2620, 0.8470, 0.8472}},
                                 {1e-1, {0.1409, 0.4724, 0.4724}, {0.2718, 0.7818, 0.7820}},
                             }};
  return t;
}

// Dark-count rate used for the efficiency table.
inline constexpr double kTable1Zeta = 1e-6;

// Headline averages.
inline constexpr double kHeadlineMpcc = 0.8594;
inline constexpr double kHeadlineUc = 0.8333;
inline constexpr double kHeadlinePcc = 0.8536;

}  // namespace clonesim
