#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "cais/risk_model.hpp"

namespace cais::model {

enum class EvidenceStatus { kPending, kSupported, kRefuted };

std::string_view to_string(EvidenceStatus s);

struct EvidenceSlot {
  std::string event;
  EvidenceStatus status = EvidenceStatus::kPending;
  std::string campaign;  ///< empty until a campaign supplies evidence
  friend bool operator==(const EvidenceSlot&, const EvidenceSlot&) = default;
};

struct SubClaim {
  std::string event;
  std::string text;
  friend bool operator==(const SubClaim&, const SubClaim&) = default;
};

/// Claim -> sub-claims -> evidence for one (situation, goal) pair.
struct AssuranceCase {
  std::string situation;
  std::string goal;
  std::string top_claim;
  std::string strategy;
  std::vector<SubClaim> sub_claims;
  std::vector<EvidenceSlot> evidence;
  friend bool operator==(const AssuranceCase&, const AssuranceCase&) = default;
};

/// One case per (situation, goal) where some negative event exposed by the
/// situation impacts the goal with '-'. Cases come out in situation
/// declaration order, then goal declaration order; sub-claims follow the
/// situation's `exposes` order.
std::vector<AssuranceCase> derive_assurance_cases(const RiskModel& model);

nlohmann::json to_json(const AssuranceCase& c);
nlohmann::json assurance_document(const std::vector<AssuranceCase>& cases);

}  // namespace cais::model
