// Copyright 2026 The getda Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// Binary training checkpoints. Values are stored as raw IEEE doubles in host
// byte order, so a round trip on the same machine is bit-exact.

#ifndef GETDA_CHECKPOINT_HPP_
#define GETDA_CHECKPOINT_HPP_

#include <filesystem>
#include <iosfwd>
#include <string>

#include "getda/trainer.hpp"

namespace getda {

struct Checkpoint {
  std::string config_hash;
  TrainerState state;
};

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& in);

// Writes to a temporary sibling and renames it into place.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace getda

#endif  // GETDA_CHECKPOINT_HPP_
