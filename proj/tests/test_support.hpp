#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "psocheck/parser.hpp"

namespace testsupport {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline std::string litmus_path(const std::string& name) {
    return std::string(LITMUS_DIR) + "/" + name;
}

inline psocheck::Program load_litmus(const std::string& name) {
    return psocheck::parse_litmus(read_file(litmus_path(name)));
}

inline const char* kMpSource = R"(name: MP
vals: 0..1
globals: x y
thread 1:
  x := 1; y := 1;
thread 2:
  r1 := y; r2 := x;
post: r1 in {0, 1} & r2 in {0, 1}
)";

inline const char* kMpFenceSource = R"(name: MP-fence
vals: 0..1
globals: x y
thread 1:
  x := 1; fnc; y := 1;
thread 2:
  r1 := y; r2 := x;
post: r1 = 1 -> r2 = 1
)";

} // namespace testsupport
