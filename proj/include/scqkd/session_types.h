// Copyright 2026 The scqkd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SCQKD_SESSION_TYPES_H
#define SCQKD_SESSION_TYPES_H

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace scqkd {

enum class SwitchSetting : uint8_t { F = 0, A = 1 };

/// (Alice, Bob) settings, indexed 0..3 as FF, FA, AF, AA.
struct SettingsPair {
    SwitchSetting alice = SwitchSetting::F;
    SwitchSetting bob = SwitchSetting::F;

    size_t index() const {
        return 2 * static_cast<size_t>(alice) + static_cast<size_t>(bob);
    }
    static SettingsPair from_index(size_t i) {
        return {static_cast<SwitchSetting>(i / 2), static_cast<SwitchSetting>(i % 2)};
    }
    auto operator<=>(const SettingsPair &) const = default;
};

constexpr size_t NUM_SETTINGS = 4;
constexpr SettingsPair FF{SwitchSetting::F, SwitchSetting::F};
constexpr SettingsPair FA{SwitchSetting::F, SwitchSetting::A};
constexpr SettingsPair AF{SwitchSetting::A, SwitchSetting::F};
constexpr SettingsPair AA{SwitchSetting::A, SwitchSetting::A};

enum class Outcome : uint8_t { D1 = 0, D2, AliceAbsorb, BobAbsorb, Null, MultiCount };
constexpr size_t NUM_OUTCOMES = 6;

/// Outcome classes seen at Alice's detectors: Null means neither D1 nor D2 clicked.
enum class DetectionClass : uint8_t { D1 = 0, D2, Null };
constexpr size_t NUM_DETECTION_CLASSES = 3;

/// Projection onto the D1/D2/no-click classes; MultiCount has no class.
std::optional<DetectionClass> detection_class(Outcome outcome);

std::string_view settings_name(SettingsPair s);
std::string_view switch_name(SwitchSetting s);
std::string_view outcome_name(Outcome o);
std::optional<Outcome> parse_outcome(std::string_view name);

/// Round counts by (settings, outcome).
struct OutcomeCounts {
    std::array<std::array<uint64_t, NUM_OUTCOMES>, NUM_SETTINGS> n{};

    uint64_t &at(SettingsPair s, Outcome o) {
        return n[s.index()][static_cast<size_t>(o)];
    }
    uint64_t at(SettingsPair s, Outcome o) const {
        return n[s.index()][static_cast<size_t>(o)];
    }
    uint64_t settings_total(SettingsPair s) const;
    uint64_t outcome_total(Outcome o) const;
    uint64_t class_count(SettingsPair s, DetectionClass c) const;
    uint64_t total() const;
    OutcomeCounts &operator+=(const OutcomeCounts &other);
    bool operator==(const OutcomeCounts &) const = default;
};

/// Conditional probabilities P(class | settings).
using OutcomeTable = std::array<std::array<double, NUM_DETECTION_CLASSES>, NUM_SETTINGS>;

}  // namespace scqkd

#endif
