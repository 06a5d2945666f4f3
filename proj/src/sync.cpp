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
#include "vsync/sync.hpp"

#include <algorithm>
#include <tuple>

#include "vsync/esql/printer.hpp"

namespace vsync::sync {

// ---------------------------------------------------------------------
// Extent classification
// ---------------------------------------------------------------------

ExtentRelation compose_extents(ExtentRelation a, ExtentRelation b) {
    if (a == b) return a;
    if (a == ExtentRelation::Equivalent) return b;
    if (b == ExtentRelation::Equivalent) return a;
    // {⊇,⊆} in either order, or anything with ≈
    return ExtentRelation::Indifferent;
}

ExtentRelation relation_substitution_extent(ExtentRelation theta) {
    switch (theta) {
        case ExtentRelation::Equivalent: return ExtentRelation::Equivalent;
        case ExtentRelation::Subset: return ExtentRelation::Superset;
        case ExtentRelation::Superset: return ExtentRelation::Subset;
        case ExtentRelation::Indifferent: break;
    }
    return ExtentRelation::Indifferent;
}

ExtentRelation attribute_substitution_extent(std::optional<ExtentRelation> theta) {
    if (!theta) return ExtentRelation::Indifferent;
    switch (*theta) {
        case ExtentRelation::Equivalent:
        case ExtentRelation::Subset: // R ⊆ S: every R row finds its join partner
            return ExtentRelation::Equivalent;
        case ExtentRelation::Superset: return ExtentRelation::Subset;
        case ExtentRelation::Indifferent: break;
    }
    return ExtentRelation::Indifferent;
}

ExtentRelation classify_extent(RewriteKind kind, std::optional<ExtentRelation> theta,
                               const DroppedComponents& dropped) {
    ExtentRelation extent = ExtentRelation::Equivalent;
    switch (kind) {
        case RewriteKind::None: break;
        case RewriteKind::RelationSubstitution:
            extent = relation_substitution_extent(theta.value());
            break;
        case RewriteKind::AttributeSubstitution:
            extent = attribute_substitution_extent(theta);
            break;
    }
    if (dropped.select_items > 0) extent = compose_extents(extent, ExtentRelation::Indifferent);
    if (dropped.where_clauses > 0) extent = compose_extents(extent, ExtentRelation::Superset);
    if (dropped.from_items > 0) extent = compose_extents(extent, ExtentRelation::Superset);
    return extent;
}

bool ve_compatible(ExtentRelation ve, ExtentRelation extent) {
    if (extent == ExtentRelation::Equivalent) return true;
    switch (ve) {
        case ExtentRelation::Equivalent: return false;
        case ExtentRelation::Superset: return extent == ExtentRelation::Superset;
        case ExtentRelation::Subset: return extent == ExtentRelation::Subset;
        case ExtentRelation::Indifferent: return true;
    }
    return false;
}

ExtentRelation classify_ws(const std::vector<ExtentRelation>& view_extents) {
    if (view_extents.empty())
        throw Error(ErrorCode::InvariantViolation, "classify_ws needs at least one view extent");
    bool any_super = false, any_sub = false, any_indiff = false;
    for (ExtentRelation e : view_extents) {
        any_super |= e == ExtentRelation::Superset;
        any_sub |= e == ExtentRelation::Subset;
        any_indiff |= e == ExtentRelation::Indifferent;
    }
    if (!any_super && !any_sub && !any_indiff) return ExtentRelation::Equivalent;
    if (any_indiff || (any_super && any_sub)) return ExtentRelation::Indifferent;
    return any_super ? ExtentRelation::Superset : ExtentRelation::Subset;
}

// ---------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------

namespace {

struct StepResult {
    esql::ViewDefinition view;
    ExtentRelation extent = ExtentRelation::Equivalent;
    std::vector<std::string> dropped;
};

// Candidate ranking: lower is better among VE-compatible extents.
int extent_rank(ExtentRelation ve, ExtentRelation extent) {
    if (extent == ExtentRelation::Equivalent) return 0;
    if (ve == ExtentRelation::Indifferent) {
        if (extent == ExtentRelation::Superset) return 1;
        if (extent == ExtentRelation::Subset) return 2;
        return 3;
    }
    return 1; // the VE's own direction (everything else fails the filter)
}

// Original alias plus the smallest integer suffix >= 2 not in use (D -> D2).
std::string fresh_alias(const std::string& base, const esql::ViewDefinition& view) {
    for (int n = 2;; ++n) {
        std::string candidate = base + std::to_string(n);
        if (!view.find_alias(candidate)) return candidate;
    }
}

std::optional<TypeDomain> declared_type(const wsmkb::Store& mkb, const AttributeRef& ref) {
    // Type constraints survive deletions, so they answer for components the
    // live schema no longer has.
    const auto& tcs = mkb.type_constraints();
    auto it = tcs.find(ref.relation());
    if (it != tcs.end()) {
        auto t = it->second.typing.find(ref.attribute_name);
        if (t != it->second.typing.end()) return t->second;
    }
    if (const RelationSchema* rel = mkb.find_relation(ref.relation()))
        return rel->attribute_type(ref.attribute_name);
    return std::nullopt;
}

bool term_uses_alias(const esql::Term& term, const std::string& alias) {
    const auto* attr = std::get_if<esql::AttributeTerm>(&term);
    return attr && attr->alias == alias;
}

/// Counterpart of r.x in s for one occurrence: identical name always
/// qualifies; a JC-mapped name only when the occurrence is replaceable.
/// Types must agree either way.
std::optional<std::string> counterpart(const wsmkb::Store& mkb, const RelationRef& r,
                                       const RelationRef& s, const std::string& x,
                                       bool replaceable) {
    auto own = declared_type(mkb, {r.source_id, r.relation_name, x});
    if (!own) return std::nullopt;
    AttributeRef same{s.source_id, s.relation_name, x};
    if (mkb.has_attribute(same)) {
        auto type = declared_type(mkb, same);
        if (type && *type == *own) return x;
    }
    if (!replaceable) return std::nullopt;
    for (const auto& jc : mkb.join_constraints()) {
        bool forward = jc.left == r && jc.right == s;
        bool backward = jc.left == s && jc.right == r;
        if (!forward && !backward) continue;
        for (const auto& [l, rr] : jc.equalities) {
            const std::string& from = forward ? l : rr;
            const std::string& to = forward ? rr : l;
            if (from != x) continue;
            AttributeRef mapped{s.source_id, s.relation_name, to};
            if (!mkb.has_attribute(mapped)) continue;
            auto type = declared_type(mkb, mapped);
            if (type && *type == *own) return to;
        }
    }
    return std::nullopt;
}

std::string describe_select(const esql::SelectItem& item) {
    return "select " + item.attribute.alias + "." + item.attribute.attribute;
}

std::string describe_clause(const esql::PrimitiveClause& clause) {
    return "clause " + esql::print_clause(clause);
}

std::string describe_from(const esql::FromItem& item) {
    return "relation " + item.relation.str() + " " + item.alias;
}

bool revalidates(const esql::ViewDefinition& view, const wsmkb::Store& mkb) {
    try {
        wsvkb::Store::validate_against(view, mkb);
        return true;
    } catch (const Error&) {
        return false;
    }
}

/// Step-level validation while other bindings of `pending` are still being
/// processed: references through aliases of `pending` are exempt, the full
/// check runs once the last binding is handled.
bool revalidates_except(const esql::ViewDefinition& view, const wsmkb::Store& mkb,
                        const RelationRef& pending) {
    try {
        esql::validate(view);
    } catch (const Error&) {
        return false;
    }
    auto exempt = [&](const std::string& alias) {
        const esql::FromItem* item = view.find_alias(alias);
        return item && item->relation == pending;
    };
    for (const auto& item : view.from)
        if (item.relation != pending && !mkb.has_relation(item.relation)) return false;
    auto attr_ok = [&](const esql::AttributeTerm& attr) {
        if (exempt(attr.alias)) return true;
        const esql::FromItem* item = view.find_alias(attr.alias);
        return item && mkb.has_attribute({item->relation.source_id, item->relation.relation_name,
                                          attr.attribute});
    };
    for (const auto& item : view.select)
        if (!attr_ok(item.attribute)) return false;
    for (const auto& clause : view.where)
        for (const esql::Term* term : {&clause.lhs, &clause.rhs})
            if (const auto* attr = std::get_if<esql::AttributeTerm>(term))
                if (!attr_ok(*attr)) return false;
    return true;
}

// ---------------------------------------------------------------------
// Relation substitution / drop
// ---------------------------------------------------------------------

std::optional<StepResult> try_substitute_relation_alias(const wsmkb::Store& mkb,
                                                        const esql::ViewDefinition& view,
                                                        const std::string& alias,
                                                        const RelationRef& substitute,
                                                        ExtentRelation theta) {
    const esql::FromItem* binding = view.find_alias(alias);
    if (!binding) return std::nullopt;
    const RelationRef r = binding->relation;
    const std::string fresh = fresh_alias(alias, view);

    esql::ViewDefinition out = view;
    std::vector<size_t> drop_select;
    std::vector<size_t> drop_where;

    for (size_t i = 0; i < out.select.size(); ++i) {
        auto& item = out.select[i];
        if (item.attribute.alias != alias) continue;
        auto mapped = counterpart(mkb, r, substitute, item.attribute.attribute,
                                  item.params.replaceable);
        if (mapped) {
            item.attribute = {fresh, *mapped};
        } else if (item.params.dispensable) {
            drop_select.push_back(i);
        } else {
            return std::nullopt;
        }
    }

    for (size_t i = 0; i < out.where.size(); ++i) {
        auto& clause = out.where[i];
        if (!term_uses_alias(clause.lhs, alias) && !term_uses_alias(clause.rhs, alias)) continue;
        esql::PrimitiveClause rewritten = clause;
        bool mappable = true;
        for (esql::Term* term : {&rewritten.lhs, &rewritten.rhs}) {
            auto* attr = std::get_if<esql::AttributeTerm>(term);
            if (!attr || attr->alias != alias) continue;
            auto mapped =
                counterpart(mkb, r, substitute, attr->attribute, clause.params.replaceable);
            if (!mapped) {
                mappable = false;
                break;
            }
            *attr = {fresh, *mapped};
        }
        if (mappable) {
            clause = rewritten;
        } else if (clause.params.dispensable) {
            drop_where.push_back(i);
        } else {
            return std::nullopt;
        }
    }

    StepResult result;
    result.extent = relation_substitution_extent(theta);
    for (size_t i : drop_select) result.dropped.push_back(describe_select(view.select[i]));
    for (size_t i : drop_where) result.dropped.push_back(describe_clause(view.where[i]));
    for (auto it = drop_select.rbegin(); it != drop_select.rend(); ++it)
        out.select.erase(out.select.begin() + static_cast<long>(*it));
    for (auto it = drop_where.rbegin(); it != drop_where.rend(); ++it)
        out.where.erase(out.where.begin() + static_cast<long>(*it));
    if (!drop_select.empty())
        result.extent = compose_extents(result.extent, ExtentRelation::Indifferent);
    if (!drop_where.empty())
        result.extent = compose_extents(result.extent, ExtentRelation::Superset);

    for (auto& item : out.from) {
        if (item.alias == alias) {
            item.relation = substitute;
            item.alias = fresh;
            break;
        }
    }

    if (out.select.empty()) return std::nullopt;
    if (!revalidates_except(out, mkb, r)) return std::nullopt;
    result.view = std::move(out);
    return result;
}

std::optional<StepResult> try_drop_relation_alias(const wsmkb::Store& mkb,
                                                  const esql::ViewDefinition& view,
                                                  const std::string& alias) {
    const esql::FromItem* binding = view.find_alias(alias);
    if (!binding) return std::nullopt;
    const RelationRef pending = binding->relation;

    StepResult result;
    result.extent = ExtentRelation::Superset; // removing a join factor
    result.dropped.push_back(describe_from(*binding));

    esql::ViewDefinition out = view;
    bool dropped_select = false, dropped_where = false;

    for (const auto& item : view.select) {
        if (item.attribute.alias != alias) continue;
        if (!item.params.dispensable) return std::nullopt;
        result.dropped.push_back(describe_select(item));
        dropped_select = true;
    }
    for (const auto& clause : view.where) {
        if (!term_uses_alias(clause.lhs, alias) && !term_uses_alias(clause.rhs, alias)) continue;
        if (!clause.params.dispensable) return std::nullopt;
        result.dropped.push_back(describe_clause(clause));
        dropped_where = true;
    }

    std::erase_if(out.select,
                  [&](const esql::SelectItem& item) { return item.attribute.alias == alias; });
    std::erase_if(out.where, [&](const esql::PrimitiveClause& clause) {
        return term_uses_alias(clause.lhs, alias) || term_uses_alias(clause.rhs, alias);
    });
    std::erase_if(out.from, [&](const esql::FromItem& item) { return item.alias == alias; });

    if (out.select.empty() || out.from.empty()) return std::nullopt;
    if (dropped_select) result.extent = compose_extents(result.extent, ExtentRelation::Indifferent);
    if (dropped_where) result.extent = compose_extents(result.extent, ExtentRelation::Superset);
    if (!revalidates_except(out, mkb, pending)) return std::nullopt;
    result.view = std::move(out);
    return result;
}

struct RelationPick {
    RelationRef relation;
    ExtentRelation theta = ExtentRelation::Equivalent;
    StepResult step;
};

std::optional<RelationPick> pick_best_relation(const wsmkb::Store& mkb,
                                               const esql::ViewDefinition& view,
                                               const std::string& alias, const RelationRef& r,
                                               ExtentRelation ve, ExtentRelation base_extent) {
    using Key = std::tuple<int, std::string, std::string, int>;
    std::optional<Key> best_key;
    std::optional<RelationPick> best;
    for (const auto& [s, theta] : mkb.candidate_substitute_relations(r)) {
        auto step = try_substitute_relation_alias(mkb, view, alias, s, theta);
        if (!step) continue;
        ExtentRelation total = compose_extents(base_extent, step->extent);
        if (!ve_compatible(ve, total)) continue;
        Key key{extent_rank(ve, total), s.source_id, s.relation_name, static_cast<int>(theta)};
        if (!best_key || key < *best_key) {
            best_key = key;
            best = RelationPick{s, theta, std::move(*step)};
        }
    }
    return best;
}

// ---------------------------------------------------------------------
// Attribute substitution / drop
// ---------------------------------------------------------------------

struct AttrOccurrences {
    std::vector<size_t> select_indices;
    std::vector<size_t> clause_indices;
    std::vector<std::string> aliases; // FROM order, only aliases with occurrences
};

AttrOccurrences collect_occurrences(const esql::ViewDefinition& view, const AttributeRef& a) {
    AttrOccurrences occ;
    std::set<std::string> bound;
    for (const auto& item : view.from)
        if (item.relation == a.relation()) bound.insert(item.alias);

    auto matches = [&](const esql::AttributeTerm& attr) {
        return attr.attribute == a.attribute_name && bound.count(attr.alias) > 0;
    };

    std::set<std::string> used;
    for (size_t i = 0; i < view.select.size(); ++i) {
        if (matches(view.select[i].attribute)) {
            occ.select_indices.push_back(i);
            used.insert(view.select[i].attribute.alias);
        }
    }
    for (size_t i = 0; i < view.where.size(); ++i) {
        for (const esql::Term* term : {&view.where[i].lhs, &view.where[i].rhs}) {
            if (const auto* attr = std::get_if<esql::AttributeTerm>(term)) {
                if (matches(*attr)) {
                    occ.clause_indices.push_back(i);
                    used.insert(attr->alias);
                    break;
                }
            }
        }
    }
    for (const auto& item : view.from)
        if (used.count(item.alias)) occ.aliases.push_back(item.alias);
    return occ;
}

struct GoverningPC {
    std::vector<std::pair<std::string, std::string>> pairs; // oriented R-side, S-side
    ExtentRelation theta = ExtentRelation::Equivalent;      // oriented R theta S
};

/// Best projection-only PC linking R and S: the one implying the best
/// extent for an attribute substitution (≡ before ⊆), earliest registered
/// on ties.
std::optional<GoverningPC> governing_pc(const wsmkb::Store& mkb, const RelationRef& r,
                                        const RelationRef& s) {
    std::optional<GoverningPC> best;
    int best_rank = 99;
    for (const auto& pc : mkb.pc_constraints()) {
        if (!pc.projection_only()) continue;
        GoverningPC oriented;
        if (pc.left.relation == r && pc.right.relation == s) {
            oriented.theta = pc.theta;
            for (size_t i = 0; i < pc.left.projection.size(); ++i)
                oriented.pairs.emplace_back(pc.left.projection[i], pc.right.projection[i]);
        } else if (pc.left.relation == s && pc.right.relation == r) {
            oriented.theta = invert(pc.theta);
            for (size_t i = 0; i < pc.left.projection.size(); ++i)
                oriented.pairs.emplace_back(pc.right.projection[i], pc.left.projection[i]);
        } else {
            continue;
        }
        int rank =
            attribute_substitution_extent(oriented.theta) == ExtentRelation::Equivalent ? 0 : 1;
        if (rank < best_rank) {
            best_rank = rank;
            best = std::move(oriented);
        }
    }
    return best;
}

/// The linking join equates the leading still-existing pair of the
/// governing PC's projections; without a PC, the first registered JC
/// equality whose both sides still exist; without either, no join.
std::optional<esql::PrimitiveClause> derive_join(const wsmkb::Store& mkb,
                                                 const std::optional<GoverningPC>& governing,
                                                 const RelationRef& r, const RelationRef& s,
                                                 const std::string& r_alias,
                                                 const std::string& s_alias) {
    auto usable = [&](const std::string& rx, const std::string& sy) {
        return mkb.has_attribute({r.source_id, r.relation_name, rx}) &&
               mkb.has_attribute({s.source_id, s.relation_name, sy});
    };
    auto make = [&](const std::string& rx, const std::string& sy) {
        esql::PrimitiveClause clause;
        clause.lhs = esql::AttributeTerm{r_alias, rx};
        clause.op = esql::Comparator::Eq;
        clause.rhs = esql::AttributeTerm{s_alias, sy};
        return clause;
    };
    if (governing) {
        for (const auto& [rx, sy] : governing->pairs)
            if (usable(rx, sy)) return make(rx, sy);
    }
    for (const auto& jc : mkb.join_constraints()) {
        bool forward = jc.left == r && jc.right == s;
        bool backward = jc.left == s && jc.right == r;
        if (!forward && !backward) continue;
        for (const auto& [l, rr] : jc.equalities) {
            const std::string& rx = forward ? l : rr;
            const std::string& sy = forward ? rr : l;
            if (usable(rx, sy)) return make(rx, sy);
        }
    }
    return std::nullopt;
}

std::optional<StepResult> try_substitute_attribute_impl(const wsmkb::Store& mkb,
                                                        const esql::ViewDefinition& view,
                                                        const AttributeRef& a,
                                                        const AttributeRef& b) {
    AttrOccurrences occ = collect_occurrences(view, a);
    if (occ.aliases.empty()) return std::nullopt;

    auto governing = governing_pc(mkb, a.relation(), b.relation());
    ExtentRelation sub_extent = attribute_substitution_extent(
        governing ? std::optional<ExtentRelation>(governing->theta) : std::nullopt);

    esql::ViewDefinition out = view;
    StepResult result;
    std::set<size_t> drop_where;
    bool substituted = false;

    for (const std::string& alias : occ.aliases) {
        std::vector<size_t> sel, cls;
        for (size_t i : occ.select_indices)
            if (view.select[i].attribute.alias == alias) sel.push_back(i);
        for (size_t i : occ.clause_indices) {
            const auto& clause = view.where[i];
            auto via = [&](const esql::Term& t) {
                const auto* attr = std::get_if<esql::AttributeTerm>(&t);
                return attr && attr->alias == alias && attr->attribute == a.attribute_name;
            };
            if (via(clause.lhs) || via(clause.rhs)) cls.push_back(i);
        }

        bool rewrites = !sel.empty();
        for (size_t i : cls)
            if (view.where[i].params.replaceable) rewrites = true;

        std::string fresh;
        if (rewrites) {
            fresh = fresh_alias(alias, out);
            const esql::FromItem* binding = out.find_alias(alias);
            out.from.push_back({b.relation(), fresh, binding->params});
        }

        for (size_t i : sel) out.select[i].attribute = {fresh, b.attribute_name};

        for (size_t i : cls) {
            auto& clause = out.where[i];
            if (clause.params.replaceable) {
                for (esql::Term* term : {&clause.lhs, &clause.rhs}) {
                    auto* attr = std::get_if<esql::AttributeTerm>(term);
                    if (attr && attr->alias == alias && attr->attribute == a.attribute_name)
                        *attr = {fresh, b.attribute_name};
                }
            } else if (clause.params.dispensable) {
                drop_where.insert(i);
            } else {
                return std::nullopt;
            }
        }

        if (rewrites) {
            substituted = true;
            if (auto join = derive_join(mkb, governing, a.relation(), b.relation(), alias, fresh))
                out.where.push_back(*join);
        }
    }

    result.extent = substituted ? sub_extent : ExtentRelation::Equivalent;
    for (size_t i : drop_where) result.dropped.push_back(describe_clause(view.where[i]));
    for (auto it = drop_where.rbegin(); it != drop_where.rend(); ++it)
        out.where.erase(out.where.begin() + static_cast<long>(*it));
    if (!drop_where.empty())
        result.extent = compose_extents(result.extent, ExtentRelation::Superset);

    if (out.select.empty()) return std::nullopt;
    if (!revalidates(out, mkb)) return std::nullopt;
    result.view = std::move(out);
    return result;
}

std::optional<StepResult> try_drop_attribute(const wsmkb::Store& mkb,
                                             const esql::ViewDefinition& view,
                                             const AttributeRef& a) {
    AttrOccurrences occ = collect_occurrences(view, a);
    if (occ.select_indices.empty() && occ.clause_indices.empty()) return std::nullopt;

    StepResult result;
    for (size_t i : occ.select_indices) {
        if (!view.select[i].params.dispensable) return std::nullopt;
        result.dropped.push_back(describe_select(view.select[i]));
    }
    for (size_t i : occ.clause_indices) {
        if (!view.where[i].params.dispensable) return std::nullopt;
        result.dropped.push_back(describe_clause(view.where[i]));
    }

    esql::ViewDefinition out = view;
    for (auto it = occ.select_indices.rbegin(); it != occ.select_indices.rend(); ++it)
        out.select.erase(out.select.begin() + static_cast<long>(*it));
    for (auto it = occ.clause_indices.rbegin(); it != occ.clause_indices.rend(); ++it)
        out.where.erase(out.where.begin() + static_cast<long>(*it));

    if (out.select.empty()) return std::nullopt;
    result.extent = ExtentRelation::Equivalent;
    if (!occ.select_indices.empty())
        result.extent = compose_extents(result.extent, ExtentRelation::Indifferent);
    if (!occ.clause_indices.empty())
        result.extent = compose_extents(result.extent, ExtentRelation::Superset);
    if (!revalidates(out, mkb)) return std::nullopt;
    result.view = std::move(out);
    return result;
}

struct AttributePick {
    AttributeRef attribute;
    StepResult step;
};

std::optional<AttributePick> pick_best_attribute(const wsmkb::Store& mkb,
                                                 const esql::ViewDefinition& view,
                                                 const AttributeRef& a, ExtentRelation ve) {
    using Key = std::tuple<int, std::string, std::string, std::string>;
    std::optional<Key> best_key;
    std::optional<AttributePick> best;
    for (const AttributeRef& b : mkb.candidate_substitute_attributes(a)) {
        auto step = try_substitute_attribute_impl(mkb, view, a, b);
        if (!step) continue;
        if (!ve_compatible(ve, step->extent)) continue;
        Key key{extent_rank(ve, step->extent), b.source_id, b.relation_name, b.attribute_name};
        if (!best_key || key < *best_key) {
            best_key = key;
            best = AttributePick{b, std::move(*step)};
        }
    }
    return best;
}

} // namespace

// ---------------------------------------------------------------------
// Public operations
// ---------------------------------------------------------------------

std::set<std::string> search_affected(const wsmkb::Store&, const wsvkb::Store& vkb,
                                      const AttributeRef& target) {
    std::set<std::string> result;
    for (const auto& view_id : vkb.views_referencing(target)) {
        auto services = vkb.web_services_of_view(view_id);
        result.insert(services.begin(), services.end());
    }
    return result;
}

std::set<std::string> search_affected(const wsmkb::Store&, const wsvkb::Store& vkb,
                                      const RelationRef& target) {
    std::set<std::string> result;
    for (const auto& view_id : vkb.views_referencing(target)) {
        auto services = vkb.web_services_of_view(view_id);
        result.insert(services.begin(), services.end());
    }
    return result;
}

ViewOutcome rewrite_view_for_relation(const wsmkb::Store& mkb, const esql::ViewDefinition& view,
                                      const RelationRef& relation) {
    esql::ViewDefinition current = view;
    ExtentRelation total = ExtentRelation::Equivalent;
    std::vector<std::string> dropped;
    bool touched = false;

    for (size_t guard = 0; guard <= view.from.size(); ++guard) {
        const esql::FromItem* binding = nullptr;
        for (const auto& item : current.from) {
            if (item.relation == relation) {
                binding = &item;
                break;
            }
        }
        if (!binding) break;
        touched = true;
        const esql::EvolutionParams params = binding->params;
        const std::string alias = binding->alias;

        std::optional<StepResult> step;
        if (params.replaceable) {
            if (auto pick = pick_best_relation(mkb, current, alias, relation, view.ve, total))
                step = std::move(pick->step);
        }
        if (!step && params.dispensable) step = try_drop_relation_alias(mkb, current, alias);
        if (!step) return Failed{};

        total = compose_extents(total, step->extent);
        dropped.insert(dropped.end(), step->dropped.begin(), step->dropped.end());
        current = std::move(step->view);
    }

    if (!touched) return Unchanged{};
    if (!ve_compatible(view.ve, total)) return Failed{};
    if (!revalidates(current, mkb)) return Failed{};
    return Rewritten{std::move(current), total, std::move(dropped)};
}

ViewOutcome rewrite_view_for_attribute(const wsmkb::Store& mkb, const esql::ViewDefinition& view,
                                       const AttributeRef& attribute) {
    AttrOccurrences occ = collect_occurrences(view, attribute);
    if (occ.select_indices.empty() && occ.clause_indices.empty()) return Unchanged{};

    // Attributes in WHERE only dispatch on the first containing clause.
    const esql::EvolutionParams dispatch = !occ.select_indices.empty()
                                               ? view.select[occ.select_indices.front()].params
                                               : view.where[occ.clause_indices.front()].params;

    std::optional<StepResult> step;
    if (dispatch.replaceable) {
        if (auto pick = pick_best_attribute(mkb, view, attribute, view.ve))
            step = std::move(pick->step);
    }
    if (!step && dispatch.dispensable) step = try_drop_attribute(mkb, view, attribute);
    if (!step) return Failed{};
    if (!ve_compatible(view.ve, step->extent)) return Failed{};
    return Rewritten{std::move(step->view), step->extent, std::move(step->dropped)};
}

std::optional<std::pair<RelationRef, ExtentRelation>>
find_relation(const wsmkb::Store& mkb, const esql::ViewDefinition& view,
              const RelationRef& relation) {
    for (const auto& item : view.from) {
        if (item.relation != relation) continue;
        if (auto pick = pick_best_relation(mkb, view, item.alias, relation, view.ve,
                                           ExtentRelation::Equivalent))
            return std::make_pair(pick->relation, pick->theta);
        return std::nullopt;
    }
    return std::nullopt;
}

bool relation_replaces(const wsmkb::Store& mkb, const esql::ViewDefinition& view,
                       const RelationRef& relation, const RelationRef& substitute,
                       ExtentRelation theta) {
    std::vector<std::string> aliases;
    for (const auto& item : view.from)
        if (item.relation == relation) aliases.push_back(item.alias);
    if (aliases.empty()) return false;

    esql::ViewDefinition current = view;
    ExtentRelation total = ExtentRelation::Equivalent;
    for (const auto& alias : aliases) {
        auto step = try_substitute_relation_alias(mkb, current, alias, substitute, theta);
        if (!step) return false;
        total = compose_extents(total, step->extent);
        current = std::move(step->view);
    }
    return revalidates(current, mkb) && ve_compatible(view.ve, total);
}

esql::ViewDefinition substitute_relation(const wsmkb::Store& mkb, const esql::ViewDefinition& view,
                                         const RelationRef& relation,
                                         const RelationRef& substitute) {
    std::vector<std::string> aliases;
    for (const auto& item : view.from)
        if (item.relation == relation) aliases.push_back(item.alias);

    esql::ViewDefinition current = view;
    for (const auto& alias : aliases) {
        auto step = try_substitute_relation_alias(mkb, current, alias, substitute,
                                                  ExtentRelation::Equivalent);
        if (!step)
            throw Error(ErrorCode::ValidationError,
                        substitute.str() + " cannot substitute " + relation.str() +
                            " in view " + view.name);
        current = std::move(step->view);
    }
    return current;
}

std::optional<AttributeRef> find_attribute(const wsmkb::Store& mkb, const AttributeRef& attribute,
                                           const esql::ViewDefinition& view) {
    if (auto pick = pick_best_attribute(mkb, view, attribute, view.ve)) return pick->attribute;
    return std::nullopt;
}

bool attribute_replaces(const wsmkb::Store& mkb, const AttributeRef& attribute,
                        const AttributeRef& substitute) {
    const auto a_type = declared_type(mkb, attribute);
    const auto b_type = declared_type(mkb, substitute);
    if (!a_type || !b_type || *a_type != *b_type) return false;
    for (const auto& jc : mkb.join_constraints()) {
        bool forward = jc.left == attribute.relation() && jc.right == substitute.relation();
        bool backward = jc.left == substitute.relation() && jc.right == attribute.relation();
        if (!forward && !backward) continue;
        for (const auto& [l, r] : jc.equalities) {
            const std::string& a_side = forward ? l : r;
            const std::string& b_side = forward ? r : l;
            if (a_side == attribute.attribute_name && b_side == substitute.attribute_name)
                return true;
        }
    }
    return false;
}

ViewOutcome substitute_attribute(const wsmkb::Store& mkb, const esql::ViewDefinition& view,
                                 const AttributeRef& attribute, const AttributeRef& substitute) {
    if (auto step = try_substitute_attribute_impl(mkb, view, attribute, substitute))
        return Rewritten{std::move(step->view), step->extent, std::move(step->dropped)};
    return Failed{};
}

std::optional<std::string> fallback_web_service(const wsmkb::Store& mkb, const wsvkb::Store& vkb,
                                                const std::string& ws_id) {
    for (const auto& candidate : mkb.replacement_chain(ws_id)) {
        auto it = vkb.ws_views().find(candidate);
        if (it == vkb.ws_views().end() || it->second.empty()) continue;
        bool healthy = true;
        for (const auto& view_id : it->second) {
            const wsvkb::ViewRecord* record = vkb.find_view(view_id);
            if (!record || !record->valid) {
                healthy = false;
                break;
            }
        }
        if (healthy) return candidate;
    }
    return std::nullopt;
}

SyncReport synchronize(wsmkb::Store& mkb, wsvkb::Store& vkb, const ChangeEvent& event) {
    if (!target_exists(mkb.schemas(), event))
        throw Error(ErrorCode::UnknownTarget, to_string(event) + " targets a missing component");

    SyncReport report;
    report.event = event;

    std::set<std::string> affected_views;
    std::set<std::string> affected_ws;
    if (const auto* da = std::get_if<DeleteAttribute>(&event)) {
        affected_views = vkb.views_referencing(da->attribute);
        affected_ws = search_affected(mkb, vkb, da->attribute);
    } else {
        const auto& dr = std::get<DeleteRelation>(event);
        affected_views = vkb.views_referencing(dr.relation);
        affected_ws = search_affected(mkb, vkb, dr.relation);
    }

    mkb.apply_event(event);

    for (const auto& view_id : affected_views) {
        const wsvkb::ViewRecord& record = vkb.view(view_id);
        ViewOutcome outcome =
            std::visit([&](const auto& change) -> ViewOutcome {
                using T = std::decay_t<decltype(change)>;
                if constexpr (std::is_same_v<T, DeleteAttribute>)
                    return rewrite_view_for_attribute(mkb, record.definition, change.attribute);
                else
                    return rewrite_view_for_relation(mkb, record.definition, change.relation);
            }, event);

        if (const auto* rewritten = std::get_if<Rewritten>(&outcome))
            vkb.update_definition(view_id, rewritten->view);
        else if (std::holds_alternative<Failed>(outcome))
            vkb.mark_invalid(view_id);
        report.per_view.emplace(view_id, std::move(outcome));
    }

    for (const auto& ws_id : affected_ws) {
        const auto& view_ids = vkb.ws_views().at(ws_id);
        bool failed = false;
        std::vector<ExtentRelation> extents;
        for (const auto& view_id : view_ids) {
            if (!vkb.view(view_id).valid) failed = true;
            auto it = report.per_view.find(view_id);
            if (it != report.per_view.end()) {
                if (const auto* rewritten = std::get_if<Rewritten>(&it->second))
                    extents.push_back(rewritten->extent);
                else
                    extents.push_back(ExtentRelation::Equivalent);
            } else {
                extents.push_back(ExtentRelation::Equivalent);
            }
        }
        if (failed) {
            WsFailure failure;
            if (mkb.find_web_service(ws_id))
                failure.fallback = fallback_web_service(mkb, vkb, ws_id);
            report.per_ws.emplace(ws_id, failure);
        } else {
            report.per_ws.emplace(ws_id, classify_ws(extents));
        }
    }
    return report;
}

} // namespace vsync::sync
