#include "jamdof/config.hpp"

#include <cctype>

#include "jamdof/errors.hpp"

namespace jamdof {

Config config_from_string(std::string_view s) {
    std::string up;
    for (char c : s) up += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (up == "PP") return Config::PP;
    if (up == "PD") return Config::PD;
    if (up == "PN") return Config::PN;
    if (up == "DP") return Config::DP;
    if (up == "DD") return Config::DD;
    if (up == "DN") return Config::DN;
    if (up == "NP") return Config::NP;
    if (up == "ND") return Config::ND;
    if (up == "NN") return Config::NN;
    throw ArgumentError("unknown configuration \"" + std::string(s) +
                        "\"; expected one of PP PD PN DP DD DN NP ND NN");
}

std::string config_to_string(Config c) {
    switch (c) {
        case Config::PP: return "PP";
        case Config::PD: return "PD";
        case Config::PN: return "PN";
        case Config::DP: return "DP";
        case Config::DD: return "DD";
        case Config::DN: return "DN";
        case Config::NP: return "NP";
        case Config::ND: return "ND";
        case Config::NN: return "NN";
    }
    return "??";
}

}  // namespace jamdof
