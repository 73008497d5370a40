#pragma once

// Shared test inputs built once per process.

#include "nvisc/psb.hpp"

namespace testing {

inline const nvisc::psb::PsbModel& reference_model() {
    static const auto model = nvisc::psb::load_model(NVISC_DATA_DIR "/reference_psb.manifest");
    return model;
}

inline const nvisc::GridFunction& reference_overlap() {
    static const auto F = nvisc::psb::thermal_overlap(reference_model(), nvisc::Temperature(0.0));
    return F;
}

}  // namespace testing
