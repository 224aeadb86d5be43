#pragma once

#include <stdexcept>

namespace fffheat {

// Thermal material parameters, SI units.
struct MaterialProperties {
    double density = 0.0;        // rho, kg/m^3
    double specific_heat = 0.0;  // c_p, J/(kg K)
    double conductivity = 0.0;   // K_0, W/(m K)

    void validate() const {
        if (!(density > 0.0) || !(specific_heat > 0.0) || !(conductivity > 0.0))
            throw std::invalid_argument(
                "MaterialProperties: density, specific_heat and conductivity must be > 0");
    }
};

// PLA, manufacturer data sheet.
inline MaterialProperties pla_properties() { return {1240.0, 1800.0, 0.13}; }

// Still air near 300 K; enclosed cavities are modeled as a conducting solid.
inline MaterialProperties air_properties() { return {1.2, 1005.0, 0.026}; }

}  // namespace fffheat
