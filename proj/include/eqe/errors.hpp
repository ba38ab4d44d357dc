#pragma once

#include <stdexcept>
#include <string>

namespace eqe {

// A post-selection branch fell below the probability floor.
struct ZeroProbabilityOutcome : std::runtime_error {
    explicit ZeroProbabilityOutcome(const std::string& msg) : std::runtime_error(msg) {}
};

// An input density matrix failed a basic physicality check.
struct NonPhysicalInput : std::runtime_error {
    explicit NonPhysicalInput(const std::string& msg) : std::runtime_error(msg) {}
};

// A confusion matrix is too ill-conditioned to unfold.
struct SingularCalibration : std::runtime_error {
    explicit SingularCalibration(const std::string& msg) : std::runtime_error(msg) {}
};

// A tomography basis set does not cover the Pauli group.
struct IncompleteBasisSet : std::runtime_error {
    explicit IncompleteBasisSet(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace eqe
