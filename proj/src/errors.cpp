#include "sgnn/errors.hpp"

namespace sgnn {

const char* to_string(ValidationKind kind) {
  switch (kind) {
    case ValidationKind::node_out_of_range: return "node_out_of_range";
    case ValidationKind::feature_rows_mismatch: return "feature_rows_mismatch";
    case ValidationKind::label_count_mismatch: return "label_count_mismatch";
    case ValidationKind::label_out_of_range: return "label_out_of_range";
    case ValidationKind::mask_overlap: return "mask_overlap";
    case ValidationKind::mask_size_mismatch: return "mask_size_mismatch";
  }
  return "unknown";
}

}  // namespace sgnn
