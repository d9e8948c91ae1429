#pragma once

#include <string>

#include "core/segmentation.hpp"

namespace tg {

/// Serialize a classifier to versioned JSON. Stable: keys are emitted in
/// sorted order and floats use shortest round-trip decimals, so equal models
/// produce byte-identical text and write -> read -> write is the identity.
std::string classifier_to_json(const ClassifierModel& model);

/// Parse classifier JSON. Any structural, type, or semantic problem raises
/// a parse error.
ClassifierModel classifier_from_json(const std::string& text);

}  // namespace tg
