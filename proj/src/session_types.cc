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

#include "scqkd/session_types.h"

namespace scqkd {

std::optional<DetectionClass> detection_class(Outcome outcome) {
    switch (outcome) {
        case Outcome::D1:
            return DetectionClass::D1;
        case Outcome::D2:
            return DetectionClass::D2;
        case Outcome::AliceAbsorb:
        case Outcome::BobAbsorb:
        case Outcome::Null:
            return DetectionClass::Null;
        case Outcome::MultiCount:
            return std::nullopt;
    }
    return std::nullopt;
}

std::string_view settings_name(SettingsPair s) {
    static constexpr std::string_view names[] = {"FF", "FA", "AF", "AA"};
    return names[s.index()];
}

std::string_view switch_name(SwitchSetting s) {
    return s == SwitchSetting::F ? "F" : "A";
}

std::string_view outcome_name(Outcome o) {
    static constexpr std::string_view names[] = {"D1", "D2", "AliceAbsorb", "BobAbsorb", "Null", "MultiCount"};
    return names[static_cast<size_t>(o)];
}

std::optional<Outcome> parse_outcome(std::string_view name) {
    for (size_t k = 0; k < NUM_OUTCOMES; k++) {
        if (outcome_name(static_cast<Outcome>(k)) == name) {
            return static_cast<Outcome>(k);
        }
    }
    return std::nullopt;
}

uint64_t OutcomeCounts::settings_total(SettingsPair s) const {
    uint64_t t = 0;
    for (auto x : n[s.index()]) {
        t += x;
    }
    return t;
}

uint64_t OutcomeCounts::outcome_total(Outcome o) const {
    uint64_t t = 0;
    for (const auto &row : n) {
        t += row[static_cast<size_t>(o)];
    }
    return t;
}

uint64_t OutcomeCounts::class_count(SettingsPair s, DetectionClass c) const {
    uint64_t t = 0;
    for (size_t k = 0; k < NUM_OUTCOMES; k++) {
        if (detection_class(static_cast<Outcome>(k)) == c) {
            t += n[s.index()][k];
        }
    }
    return t;
}

uint64_t OutcomeCounts::total() const {
    uint64_t t = 0;
    for (const auto &row : n) {
        for (auto x : row) {
            t += x;
        }
    }
    return t;
}

OutcomeCounts &OutcomeCounts::operator+=(const OutcomeCounts &other) {
    for (size_t s = 0; s < NUM_SETTINGS; s++) {
        for (size_t o = 0; o < NUM_OUTCOMES; o++) {
            n[s][o] += other.n[s][o];
        }
    }
    return *this;
}

}  // namespace scqkd
