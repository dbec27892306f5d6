/* attribute-value matrix rendering and JSON (de)serialization */

#ifndef MORPHOUNIFY_AVM_HPP
#define MORPHOUNIFY_AVM_HPP

#include <string>

#include <json.hpp>

#include "morphounify/fs.hpp"

namespace morphounify {

// Deterministic indented AVM: features in appropriateness order, shared nodes
// tagged #n in first-visit order, literals quoted.
std::string avm_to_string(const Engine& e, NodeId root);

nlohmann::json fs_to_json(const Engine& e, NodeId root);

// Rebuilds a structure dumped by fs_to_json; the result is isomorphic.
NodeId json_to_fs(Engine& e, const nlohmann::json& j);

} // namespace morphounify

#endif
