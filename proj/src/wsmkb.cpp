/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/
#include "vsync/wsmkb.hpp"

#include <algorithm>

namespace vsync::wsmkb {

namespace {

bool is_containment_theta(ExtentRelation theta) {
    return theta == ExtentRelation::Subset || theta == ExtentRelation::Superset ||
           theta == ExtentRelation::Equivalent;
}

} // namespace

const SourceSchema* Store::find_source(const std::string& source_id) const {
    auto it = schemas_.find(source_id);
    return it == schemas_.end() ? nullptr : &it->second;
}

const RelationSchema* Store::find_relation(const RelationRef& relation) const {
    const SourceSchema* src = find_source(relation.source_id);
    return src ? src->find_relation(relation.relation_name) : nullptr;
}

bool Store::has_relation(const RelationRef& relation) const {
    return find_relation(relation) != nullptr;
}

bool Store::has_attribute(const AttributeRef& attribute) const {
    const RelationSchema* rel = find_relation(attribute.relation());
    return rel != nullptr && rel->has_attribute(attribute.attribute_name);
}

const WebService* Store::find_web_service(const std::string& ws_id) const {
    auto it = web_services_.find(ws_id);
    return it == web_services_.end() ? nullptr : &it->second;
}

void Store::validate_constraint(const TypeIntegrityConstraint& tc) const {
    const RelationSchema* rel = find_relation(tc.relation);
    if (!rel)
        throw Error(ErrorCode::DanglingReference,
                    "type constraint references unknown relation " + tc.relation.str());
    if (tc.typing.size() != rel->attributes.size())
        throw Error(ErrorCode::InvariantViolation,
                    "type constraint for " + tc.relation.str() +
                        " does not cover exactly the relation's attributes");
    for (const auto& [name, type] : rel->attributes) {
        auto it = tc.typing.find(name);
        if (it == tc.typing.end())
            throw Error(ErrorCode::InvariantViolation, "type constraint for " + tc.relation.str() +
                                                           " misses attribute " + name);
        if (it->second != type)
            throw Error(ErrorCode::InvariantViolation,
                        "type constraint for " + tc.relation.str() + " declares " + name + " as " +
                            to_string(it->second) + " but the schema says " + to_string(type));
    }
}

void Store::validate_constraint(const JoinConstraint& jc) const {
    if (jc.equalities.empty())
        throw Error(ErrorCode::InvariantViolation, "join constraint between " + jc.left.str() +
                                                       " and " + jc.right.str() +
                                                       " has no equalities");
    const RelationSchema* left = find_relation(jc.left);
    const RelationSchema* right = find_relation(jc.right);
    if (!left)
        throw Error(ErrorCode::DanglingReference,
                    "join constraint references unknown relation " + jc.left.str());
    if (!right)
        throw Error(ErrorCode::DanglingReference,
                    "join constraint references unknown relation " + jc.right.str());
    for (const auto& [l, r] : jc.equalities) {
        auto lt = left->attribute_type(l);
        auto rt = right->attribute_type(r);
        if (!lt)
            throw Error(ErrorCode::DanglingReference,
                        "join constraint references unknown attribute " + jc.left.str() + "." + l);
        if (!rt)
            throw Error(ErrorCode::DanglingReference,
                        "join constraint references unknown attribute " + jc.right.str() + "." + r);
        if (*lt != *rt)
            throw Error(ErrorCode::InvariantViolation,
                        "join constraint equality " + jc.left.str() + "." + l + " = " +
                            jc.right.str() + "." + r + " pairs " + to_string(*lt) + " with " +
                            to_string(*rt));
    }
}

void Store::validate_constraint(const PCConstraint& pc) const {
    if (!is_containment_theta(pc.theta))
        throw Error(ErrorCode::InvariantViolation,
                    "pc constraint theta must be subset, superset, or equivalent");
    const RelationSchema* left = find_relation(pc.left.relation);
    const RelationSchema* right = find_relation(pc.right.relation);
    if (!left)
        throw Error(ErrorCode::DanglingReference,
                    "pc constraint references unknown relation " + pc.left.relation.str());
    if (!right)
        throw Error(ErrorCode::DanglingReference,
                    "pc constraint references unknown relation " + pc.right.relation.str());
    if (pc.left.projection.empty() || pc.right.projection.empty())
        throw Error(ErrorCode::InvariantViolation, "pc constraint projections must be nonempty");
    if (pc.left.projection.size() != pc.right.projection.size())
        throw Error(ErrorCode::InvariantViolation,
                    "pc constraint projections differ in length (" + pc.left.relation.str() +
                        " vs " + pc.right.relation.str() + ")");
    for (size_t i = 0; i < pc.left.projection.size(); ++i) {
        auto lt = left->attribute_type(pc.left.projection[i]);
        auto rt = right->attribute_type(pc.right.projection[i]);
        if (!lt)
            throw Error(ErrorCode::DanglingReference, "pc constraint projects unknown attribute " +
                                                          pc.left.relation.str() + "." +
                                                          pc.left.projection[i]);
        if (!rt)
            throw Error(ErrorCode::DanglingReference, "pc constraint projects unknown attribute " +
                                                          pc.right.relation.str() + "." +
                                                          pc.right.projection[i]);
        if (*lt != *rt)
            throw Error(ErrorCode::InvariantViolation,
                        "pc constraint projection pair " + pc.left.projection[i] + "/" +
                            pc.right.projection[i] + " mixes " + to_string(*lt) + " and " +
                            to_string(*rt));
    }
    for (const PCSide* side : {&pc.left, &pc.right}) {
        const RelationSchema* rel = side == &pc.left ? left : right;
        for (const auto& clause : side->selection) {
            for (const esql::Term* term : {&clause.lhs, &clause.rhs}) {
                if (const auto* attr = std::get_if<esql::AttributeTerm>(term)) {
                    if (attr->alias != side->relation.relation_name)
                        throw Error(ErrorCode::InvariantViolation,
                                    "pc selection clause must qualify attributes with the "
                                    "relation name " +
                                        side->relation.relation_name);
                    if (!rel->has_attribute(attr->attribute))
                        throw Error(ErrorCode::DanglingReference,
                                    "pc selection references unknown attribute " +
                                        side->relation.str() + "." + attr->attribute);
                }
            }
            if (!std::holds_alternative<esql::AttributeTerm>(clause.lhs) &&
                !std::holds_alternative<esql::AttributeTerm>(clause.rhs))
                throw Error(ErrorCode::InvariantViolation,
                            "pc selection clause compares two literals");
        }
    }
}

void Store::add(const SourceSchema& source) {
    validate(source);
    auto it = schemas_.find(source.source_id);
    if (it != schemas_.end() && it->second == source) return; // identical re-registration
    SchemaSet saved = schemas_;
    schemas_[source.source_id] = source;
    // Re-validate registered constraints against the new shape. Dangling
    // references are tolerated (the candidate queries skip them); violated
    // invariants on still-existing components reject the re-registration.
    try {
        for (const auto& [rel, tc] : tcs_)
            if (has_relation(rel)) validate_constraint(tc);
        for (const auto& jc : jcs_)
            if (has_relation(jc.left) && has_relation(jc.right)) validate_constraint(jc);
        for (const auto& pc : pcs_)
            if (has_relation(pc.left.relation) && has_relation(pc.right.relation))
                validate_constraint(pc);
    } catch (const Error&) {
        schemas_ = std::move(saved);
        throw;
    }
}

void Store::add(const TypeIntegrityConstraint& tc) {
    validate_constraint(tc);
    tcs_[tc.relation] = tc;
}

void Store::add(const JoinConstraint& jc) {
    validate_constraint(jc);
    if (std::find(jcs_.begin(), jcs_.end(), jc) != jcs_.end()) return;
    jcs_.push_back(jc);
}

void Store::add(const PCConstraint& pc) {
    validate_constraint(pc);
    if (std::find(pcs_.begin(), pcs_.end(), pc) != pcs_.end()) return;
    pcs_.push_back(pc);
}

void Store::add(const WebService& ws) {
    validate(ws);
    for (const auto& source_id : ws.source_ids)
        if (!find_source(source_id))
            throw Error(ErrorCode::DanglingReference, "web service " + ws.ws_id +
                                                          " references unknown source " +
                                                          source_id);
    for (const auto& other : ws.replacements)
        if (!find_web_service(other))
            throw Error(ErrorCode::DanglingReference, "web service " + ws.ws_id +
                                                          " references unknown replacement " +
                                                          other);
    web_services_[ws.ws_id] = ws;
    replacements_[ws.ws_id] = ws.replacements;
}

void Store::add(const ReplacementRule& rule) {
    auto it = web_services_.find(rule.ws_id);
    if (it == web_services_.end())
        throw Error(ErrorCode::UnknownWebService,
                    "replacement rule for unknown web service " + rule.ws_id);
    for (const auto& other : rule.substitutes) {
        if (other == rule.ws_id)
            throw Error(ErrorCode::InvariantViolation,
                        "web service " + rule.ws_id + " lists itself as a replacement");
        if (!find_web_service(other))
            throw Error(ErrorCode::DanglingReference, "replacement rule for " + rule.ws_id +
                                                          " references unknown web service " +
                                                          other);
    }
    replacements_[rule.ws_id] = rule.substitutes;
    it->second.replacements = rule.substitutes;
}

void Store::apply_event(const ChangeEvent& event) { schemas_ = apply_change(schemas_, event); }

TypeDomain Store::attribute_type(const AttributeRef& attribute) const {
    auto it = tcs_.find(attribute.relation());
    if (it != tcs_.end()) {
        auto t = it->second.typing.find(attribute.attribute_name);
        if (t != it->second.typing.end()) return t->second;
    }
    throw Error(ErrorCode::UnknownAttribute,
                "no type constraint covers attribute " + attribute.str());
}

std::set<AttributeRef> Store::candidate_substitute_attributes(const AttributeRef& attribute) const {
    auto declared_type = [this](const AttributeRef& ref) -> std::optional<TypeDomain> {
        auto it = tcs_.find(ref.relation());
        if (it == tcs_.end()) return std::nullopt;
        auto t = it->second.typing.find(ref.attribute_name);
        if (t == it->second.typing.end()) return std::nullopt;
        return t->second;
    };

    std::set<AttributeRef> result;
    auto own_type = declared_type(attribute);
    if (!own_type) return result;

    for (const auto& jc : jcs_) {
        for (const auto& [l, r] : jc.equalities) {
            AttributeRef candidate;
            if (jc.left == attribute.relation() && l == attribute.attribute_name)
                candidate = {jc.right.source_id, jc.right.relation_name, r};
            else if (jc.right == attribute.relation() && r == attribute.attribute_name)
                candidate = {jc.left.source_id, jc.left.relation_name, l};
            else
                continue;
            if (candidate == attribute) continue;
            if (!has_attribute(candidate)) continue;
            auto type = declared_type(candidate);
            if (type && *type == *own_type) result.insert(candidate);
        }
    }
    return result;
}

std::set<std::pair<RelationRef, ExtentRelation>>
Store::candidate_substitute_relations(const RelationRef& relation) const {
    std::set<std::pair<RelationRef, ExtentRelation>> result;
    for (const auto& pc : pcs_) {
        if (!pc.projection_only()) continue;
        RelationRef other;
        ExtentRelation theta;
        if (pc.left.relation == relation) {
            other = pc.right.relation;
            theta = pc.theta;
        } else if (pc.right.relation == relation) {
            other = pc.left.relation;
            theta = invert(pc.theta);
        } else {
            continue;
        }
        if (other == relation) continue;
        if (!has_relation(other)) continue;
        result.emplace(other, theta);
    }
    return result;
}

const std::vector<std::string>& Store::replacement_chain(const std::string& ws_id) const {
    if (!find_web_service(ws_id))
        throw Error(ErrorCode::UnknownWebService, "unknown web service " + ws_id);
    return replacements_.at(ws_id);
}

} // namespace vsync::wsmkb
