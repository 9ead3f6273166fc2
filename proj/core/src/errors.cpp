#include "cglwaves/errors.hpp"

namespace cglwaves {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateLattice: return "DegenerateLattice";
    case ErrorCode::NearLatticePoint: return "NearLatticePoint";
    case ErrorCode::DegenerateArguments: return "DegenerateArguments";
    case ErrorCode::NotARoot: return "NotARoot";
    case ErrorCode::ZeroDispersion: return "ZeroDispersion";
    case ErrorCode::ZeroModulus: return "ZeroModulus";
    case ErrorCode::DegenerateLeading: return "DegenerateLeading";
    case ErrorCode::ResonantIndex: return "ResonantIndex";
    case ErrorCode::InvalidFreeConstant: return "InvalidFreeConstant";
    case ErrorCode::InsufficientTerms: return "InsufficientTerms";
    case ErrorCode::NearPole: return "NearPole";
    case ErrorCode::InversionFailure: return "InversionFailure";
    case ErrorCode::CsiZeroRestriction: return "CsiZeroRestriction";
    case ErrorCode::BranchCut: return "BranchCut";
    case ErrorCode::Unresolvable: return "Unresolvable";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace cglwaves
