// Copyright 2026 The pbit-nqs developers
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#pragma once
#include <iosfwd>
#include <string>
#include <vector>

#include "pbitnqs/trainer.hpp"

namespace pbitnqs {

// A training run description as read from the flat key = value config format.
// `chimera = auto` defers the graph choice until the sampling mode is known:
// shore 4, enough columns for the visible chains and enough rows for the
// (possibly duplicated) hidden chains, which reproduces (12,3,4) for the
// 12-spin reweight setup and (24,3,4) for its psi2 twin.
struct RunSpec {
    TrainConfig config;
    bool chimera_auto = true;

    // Applies one config entry; throws ConfigError naming the key on unknown
    // keys or bad values.
    void apply(const std::string& key, const std::string& value);

    // Resolves chimera_auto and validates; the result is ready for train().
    TrainConfig resolve() const;

    static RunSpec preset_tfim12();
};

// Layers file entries on top of `base` (preset < config file < CLI flags).
RunSpec parse_config(std::istream& is, RunSpec base = {});
RunSpec parse_config_file(const std::string& path, RunSpec base = {});

// Serializes a resolved config in the same key = value schema, covering every
// key, so a manifest is itself a valid config file.
void write_config(std::ostream& os, const TrainConfig& cfg);

// Manifest = commented provenance header + the full resolved config.
void write_manifest(std::ostream& os, const TrainConfig& cfg,
                    const std::vector<std::string>& comment_lines);

// CSV streaming of the training history.
extern const char* const kHistoryCsvHeader;
std::string format_epoch_csv(const EpochRecord& rec);

}  // namespace pbitnqs
