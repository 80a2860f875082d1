#pragma once

// Built-in parameter sets for the reproduction runs. The text is kept
// identical to fixtures/*.json (a test checks this).

#include <optional>
#include <string_view>

#include "flockstab/model.hpp"
#include "flockstab/spec_json.hpp"

namespace flockstab::fixtures {

inline constexpr std::string_view fig1 = R"json({
  "arrangement": "TriatomicNN",
  "note": "rho_x,1 of type 3 is the exact value -1/7 behind the rounded 0.142857",
  "agents": [
    {"g_x": -1, "g_v": -1.3, "rho_x": {"1": -0.6}, "rho_v": {"1": -0.3}, "infer": ["-1"]},
    {"g_x": -1, "g_v": -1.3, "rho_x": {"1": -0.8}, "rho_v": {"1": -0.3}, "infer": ["-1"]},
    {"g_x": -1, "g_v": -1.3, "rho_x": {"1": "-1/7"}, "rho_v": {"1": -0.3}, "infer": ["-1"]}
  ]
}
)json";

inline constexpr std::string_view fig2 = R"json({
  "arrangement": "TriatomicNN",
  "agents": [
    {"g_x": -1, "g_v": -1.3, "rho_x": {"1": -0.6}, "rho_v": {"1": -0.3}, "infer": ["-1"]},
    {"g_x": -1, "g_v": -1.3, "rho_x": {"1": -0.8}, "rho_v": {"1": -0.3}, "infer": ["-1"]},
    {"g_x": -1, "g_v": -1.3, "rho_x": {"1": -0.10}, "rho_v": {"1": -0.3}, "infer": ["-1"]}
  ]
}
)json";

inline constexpr std::string_view fig3 = R"json({
  "arrangement": "DiatomicNNN",
  "agents": [
    {"g_x": -1, "g_v": -1,
     "rho_x": {"1": "-5/60", "-1": "-15/60", "2": "-20/60", "-2": "-20/60"},
     "rho_v": {"1": -0.30, "-1": -0.70}},
    {"g_x": -1, "g_v": -1,
     "rho_x": {"1": "-27/60", "-1": "-9/60", "2": "-12/60", "-2": "-12/60"},
     "rho_v": {"1": -0.30, "-1": -0.70}}
  ]
}
)json";

inline constexpr std::string_view fig3c = R"json({
  "arrangement": "DiatomicNNN",
  "note": "only seven rho_x values are published; rho_x,-2 of type 2 is completed from the row-sum constraint (-0.05)",
  "agents": [
    {"g_x": -1, "g_v": -1,
     "rho_x": {"1": -0.30, "-1": -0.25, "2": -0.25, "-2": -0.20},
     "rho_v": {"1": -0.30, "-1": -0.70}},
    {"g_x": -1, "g_v": -1,
     "rho_x": {"1": -0.30, "-1": -0.55, "2": -0.10},
     "rho_v": {"1": -0.30, "-1": -0.70},
     "infer": ["x:-2"]}
  ]
}
)json";

inline FlockSpec figure1() { return parse_spec(fig1); }
inline FlockSpec figure2() { return parse_spec(fig2); }
inline FlockSpec figure3() { return parse_spec(fig3); }
inline FlockSpec figure3c() { return parse_spec(fig3c); }

/// Extremal transient printed with a published run.
struct PublishedTransient {
  double magnitude;
  double time;
};

inline constexpr PublishedTransient kFig1a{-221.0, 244.6};
inline constexpr PublishedTransient kFig1b{-220.8, 244.4};
inline constexpr PublishedTransient kFig3a{-72.8, 79.3};
inline constexpr PublishedTransient kFig3b{-72.0, 78.5};

inline constexpr int kFig1N = 180;
inline constexpr int kFig3N = 100;
inline constexpr double kFig1TMax = 400.0;
inline constexpr int kFig2ScanN[] = {30, 60, 90, 120, 150, 180};

}  // namespace flockstab::fixtures
