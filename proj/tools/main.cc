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

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "scqkd/harness.h"

int main(int argc, char **argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        scqkd::RunRequest request = scqkd::parse_config(args);
        scqkd::RunManifest manifest = scqkd::run(request);
        for (const auto &path : manifest.outputs) {
            std::cout << "wrote " << path << "\n";
        }
        if (manifest.verdict) {
            std::cout << "verdict: " << scqkd::verdict_name(*manifest.verdict) << "\n";
        }
        return scqkd::exit_code(manifest);
    } catch (const CLI::CallForHelp &) {
        std::cout << "usage: scqkd --rounds N [--seed S] [--attack none|incoherent|number-preserving]\n"
                     "             [--theta T] [--alpha0p A] [--alpha1p A] [--return-leg none|unattack|general]\n"
                     "             [--return-angle PHI] [--transmittance T] [--test-fraction F] [--loss L]\n"
                     "             [--trojan none|timing|polarization|both] [--trojan-probe P]\n"
                     "             [--sweep START:END:STEPS] [--workers N] [--out DIR] [--config FILE]\n"
                     "             [--min-visibility V] [--max-error E]\n";
        return 0;
    } catch (const scqkd::UsageError &e) {
        std::cerr << "scqkd: " << e.what() << "\nrun 'scqkd --help' for usage.\n";
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "scqkd: error: " << e.what() << "\n";
        return 1;
    }
}
