// Copyright 2026 The s3grl Authors.
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


// Prints the manifest and the first records of a record file.

#include <algorithm>
#include <cstdlib>
#include <iomanip>
#include <iostream>

#include "s3grl/record_io.hpp"

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: inspect_records FILE.s3gr [COUNT]\n";
    return 2;
  }
  try {
    s3grl::RecordReader reader(argv[1]);
    reader.verify_manifest();
    const std::size_t count = argc > 2 ? std::strtoul(argv[2], nullptr, 10) : 3;
    std::cout << reader.size() << " records, checksum fnv1a64:" << s3grl::to_hex(reader.checksum()) << "\n";
    for (std::size_t i = 0; i < std::min(count, reader.size()); ++i) {
      const auto rec = reader.read(i);
      std::cout << "link (" << rec.u << ", " << rec.v << ") label " << int(rec.label) << ", " << rec.pooled_count()
                << " pooled nodes, " << rec.num_operators << " operators x " << rec.block_width << " columns\n";
      for (std::size_t op = 0; op < rec.num_operators; ++op) {
        std::cout << "  op " << op << " row 0:";
        const auto row = rec.row(op, 0);
        for (std::size_t c = 0; c < std::min<std::size_t>(row.size(), 8); ++c)
          std::cout << ' ' << std::setprecision(4) << row[c];
        std::cout << (row.size() > 8 ? " ...\n" : "\n");
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
