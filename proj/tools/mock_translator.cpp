// Copyright 2026 The concatmt Authors
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

// Deterministic stand-in translator for pipeline tests.
//
//   concatmt-mock-translator <identity|reverse|truncate:K> IN OUT

#include <fstream>
#include <iostream>

#include "concatmt/translate.hpp"

int main(int argc, char** argv) {
  if (argc != 4) {
    std::cerr << "usage: " << argv[0] << " <identity|reverse|truncate:K> IN OUT\n";
    return 2;
  }
  try {
    const auto mock = concatmt::mock::parse(argv[1]);
    std::ifstream in(argv[2], std::ios::binary);
    if (!in) {
      std::cerr << "cannot open " << argv[2] << "\n";
      return 1;
    }
    std::ofstream out(argv[3], std::ios::binary | std::ios::trunc);
    if (!out) {
      std::cerr << "cannot write " << argv[3] << "\n";
      return 1;
    }
    concatmt::mock::translate_stream(mock, in, out);
    return out ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
}
