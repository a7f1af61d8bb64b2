#pragma once

#include <string>

namespace hermflow {

// Selects one member of the family dg/dt = -S + a Q1 + b Q2 + c Q3 + d Q4.
struct FlowCoefficients {
    double a = 0, b = 0, c = 0, d = 0;
    std::string name;
};

}  // namespace hermflow
