#pragma once

#include <string>
#include <string_view>

namespace jamdof {

// CSIT/JSIT availability pair. First letter: channel state information at
// the transmitter; second: jammer state information. P = perfect
// (instantaneous), D = delayed, N = none.
enum class Config {
    PP,
    PD,
    PN,
    DP,
    DD,
    DN,
    NP,
    ND,
    NN,
};

// "DP" -> Config::DP. Case-insensitive. Throws ArgumentError otherwise.
Config config_from_string(std::string_view s);

std::string config_to_string(Config c);

}  // namespace jamdof
