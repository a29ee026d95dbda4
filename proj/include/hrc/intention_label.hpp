// Copyright 2026 The HRC Co-Assembly Authors
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

#ifndef HRC_INTENTION_LABEL_HPP_
#define HRC_INTENTION_LABEL_HPP_

#include <compare>
#include <string>

namespace hrc {

inline constexpr int kNumBlocks = 12;
inline constexpr int kNumIntentions = kNumBlocks + 1;

// Reaching block i (R_i, i = 1..12) or Idle. Class index 0..11 are R_1..R_12,
// index 12 is Idle.
class IntentionLabel {
 public:
  constexpr IntentionLabel() = default;

  static constexpr IntentionLabel reach(int block) {
    return IntentionLabel(block - 1);
  }
  static constexpr IntentionLabel idle() {
    return IntentionLabel(kNumIntentions - 1);
  }
  static IntentionLabel from_index(int index);
  static IntentionLabel parse(const std::string& name);

  constexpr int index() const { return index_; }
  constexpr bool is_idle() const { return index_ == kNumIntentions - 1; }
  constexpr int block() const { return is_idle() ? 0 : index_ + 1; }
  std::string name() const;

  friend constexpr auto operator<=>(IntentionLabel, IntentionLabel) = default;

 private:
  constexpr explicit IntentionLabel(int index) : index_(index) {}
  int index_ = kNumIntentions - 1;
};

}  // namespace hrc

#endif  // HRC_INTENTION_LABEL_HPP_
