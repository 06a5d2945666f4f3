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
#include "vsync/oracle.hpp"

#include <algorithm>
#include <random>
#include <tuple>

#include "vsync/esql/printer.hpp"

// The enumeration below re-implements the rewrite legality rules from
// scratch: candidate discovery over the raw constraint lists, counterpart
// resolution, cascade and VE checks, extent arithmetic. It shares only the
// model and esql modules with the engine.

namespace vsync::oracle {

namespace {

using esql::ViewDefinition;

// ---------------------------------------------------------------------
// Independent lookups and extent arithmetic
// ---------------------------------------------------------------------

const RelationSchema* post_relation(const SchemaSet& post, const RelationRef& r) {
    auto it = post.find(r.source_id);
    if (it == post.end()) return nullptr;
    return it->second.find_relation(r.relation_name);
}

bool post_has_attribute(const SchemaSet& post, const AttributeRef& a) {
    const RelationSchema* rel = post_relation(post, a.relation());
    return rel && rel->has_attribute(a.attribute_name);
}

std::optional<TypeDomain> lookup_type(const wsmkb::Store& mkb, const SchemaSet& post,
                                      const AttributeRef& ref) {
    auto it = mkb.type_constraints().find(ref.relation());
    if (it != mkb.type_constraints().end()) {
        auto t = it->second.typing.find(ref.attribute_name);
        if (t != it->second.typing.end()) return t->second;
    }
    if (const RelationSchema* rel = post_relation(post, ref.relation()))
        return rel->attribute_type(ref.attribute_name);
    return std::nullopt;
}

ExtentRelation meet(ExtentRelation a, ExtentRelation b) {
    if (a == b) return a;
    if (a == ExtentRelation::Equivalent) return b;
    if (b == ExtentRelation::Equivalent) return a;
    return ExtentRelation::Indifferent;
}

ExtentRelation rel_sub_extent(ExtentRelation theta) {
    if (theta == ExtentRelation::Equivalent) return ExtentRelation::Equivalent;
    if (theta == ExtentRelation::Subset) return ExtentRelation::Superset;
    if (theta == ExtentRelation::Superset) return ExtentRelation::Subset;
    return ExtentRelation::Indifferent;
}

ExtentRelation attr_sub_extent(std::optional<ExtentRelation> theta) {
    if (!theta) return ExtentRelation::Indifferent;
    if (*theta == ExtentRelation::Equivalent || *theta == ExtentRelation::Subset)
        return ExtentRelation::Equivalent;
    if (*theta == ExtentRelation::Superset) return ExtentRelation::Subset;
    return ExtentRelation::Indifferent;
}

bool ve_ok(ExtentRelation ve, ExtentRelation extent) {
    if (extent == ExtentRelation::Equivalent) return true;
    if (ve == ExtentRelation::Indifferent) return true;
    return ve == extent;
}

int rank_of(ExtentRelation ve, ExtentRelation extent) {
    if (extent == ExtentRelation::Equivalent) return 0;
    if (ve == ExtentRelation::Indifferent) {
        if (extent == ExtentRelation::Superset) return 1;
        if (extent == ExtentRelation::Subset) return 2;
        return 3;
    }
    return 1;
}

std::string next_alias(const std::string& base, const ViewDefinition& view) {
    for (int n = 2;; ++n) {
        std::string candidate = base + std::to_string(n);
        if (!view.find_alias(candidate)) return candidate;
    }
}

bool term_on_alias(const esql::Term& term, const std::string& alias) {
    const auto* attr = std::get_if<esql::AttributeTerm>(&term);
    return attr && attr->alias == alias;
}

bool view_valid(const ViewDefinition& view, const SchemaSet& post) {
    try {
        esql::validate(view);
    } catch (const Error&) {
        return false;
    }
    for (const auto& item : view.from)
        if (!post_relation(post, item.relation)) return false;
    auto attr_ok = [&](const esql::AttributeTerm& attr) {
        const esql::FromItem* item = view.find_alias(attr.alias);
        return item && post_has_attribute(post, {item->relation.source_id,
                                                 item->relation.relation_name, attr.attribute});
    };
    for (const auto& item : view.select)
        if (!attr_ok(item.attribute)) return false;
    for (const auto& clause : view.where) {
        for (const esql::Term* term : {&clause.lhs, &clause.rhs})
            if (const auto* attr = std::get_if<esql::AttributeTerm>(term))
                if (!attr_ok(*attr)) return false;
    }
    return true;
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

struct Step {
    ViewDefinition view;
    ExtentRelation extent = ExtentRelation::Equivalent;
    std::vector<std::string> dropped;
};

// ---------------------------------------------------------------------
// Candidate discovery over the raw constraint lists
// ---------------------------------------------------------------------

std::vector<AttributeRef> attribute_candidates(const wsmkb::Store& mkb, const SchemaSet& post,
                                               const AttributeRef& a) {
    std::set<AttributeRef> found;
    auto own = lookup_type(mkb, post, a);
    if (!own) return {};
    for (const auto& jc : mkb.join_constraints()) {
        for (const auto& [l, r] : jc.equalities) {
            AttributeRef b;
            if (jc.left == a.relation() && l == a.attribute_name)
                b = {jc.right.source_id, jc.right.relation_name, r};
            else if (jc.right == a.relation() && r == a.attribute_name)
                b = {jc.left.source_id, jc.left.relation_name, l};
            else
                continue;
            if (b == a || !post_has_attribute(post, b)) continue;
            auto type = lookup_type(mkb, post, b);
            if (type && *type == *own) found.insert(b);
        }
    }
    return {found.begin(), found.end()};
}

std::vector<std::pair<RelationRef, ExtentRelation>>
relation_candidates(const wsmkb::Store& mkb, const SchemaSet& post, const RelationRef& r) {
    std::set<std::pair<RelationRef, ExtentRelation>> found;
    for (const auto& pc : mkb.pc_constraints()) {
        if (!pc.left.selection.empty() || !pc.right.selection.empty()) continue;
        RelationRef other;
        ExtentRelation theta;
        if (pc.left.relation == r) {
            other = pc.right.relation;
            theta = pc.theta;
        } else if (pc.right.relation == r) {
            other = pc.left.relation;
            theta = invert(pc.theta);
        } else {
            continue;
        }
        if (other == r || !post_relation(post, other)) continue;
        found.emplace(other, theta);
    }
    return {found.begin(), found.end()};
}

// ---------------------------------------------------------------------
// Construction rules (mirrors of the documented rewrite construction)
// ---------------------------------------------------------------------

std::optional<std::string> map_attribute(const wsmkb::Store& mkb, const SchemaSet& post,
                                         const RelationRef& r, const RelationRef& s,
                                         const std::string& x, bool replaceable) {
    auto own = lookup_type(mkb, post, {r.source_id, r.relation_name, x});
    if (!own) return std::nullopt;
    AttributeRef same{s.source_id, s.relation_name, x};
    if (post_has_attribute(post, same)) {
        auto type = lookup_type(mkb, post, same);
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
            if (!post_has_attribute(post, mapped)) continue;
            auto type = lookup_type(mkb, post, mapped);
            if (type && *type == *own) return to;
        }
    }
    return std::nullopt;
}

struct OrientedPC {
    std::vector<std::pair<std::string, std::string>> pairs;
    ExtentRelation theta = ExtentRelation::Equivalent;
};

std::optional<OrientedPC> best_pc(const wsmkb::Store& mkb, const RelationRef& r,
                                  const RelationRef& s) {
    std::optional<OrientedPC> best;
    int best_rank = 99;
    for (const auto& pc : mkb.pc_constraints()) {
        if (!pc.left.selection.empty() || !pc.right.selection.empty()) continue;
        OrientedPC oriented;
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
        int rank = attr_sub_extent(oriented.theta) == ExtentRelation::Equivalent ? 0 : 1;
        if (rank < best_rank) {
            best_rank = rank;
            best = std::move(oriented);
        }
    }
    return best;
}

std::optional<esql::PrimitiveClause> linking_join(const wsmkb::Store& mkb, const SchemaSet& post,
                                                  const std::optional<OrientedPC>& pc,
                                                  const RelationRef& r, const RelationRef& s,
                                                  const std::string& r_alias,
                                                  const std::string& s_alias) {
    auto usable = [&](const std::string& rx, const std::string& sy) {
        return post_has_attribute(post, {r.source_id, r.relation_name, rx}) &&
               post_has_attribute(post, {s.source_id, s.relation_name, sy});
    };
    auto make = [&](const std::string& rx, const std::string& sy) {
        esql::PrimitiveClause clause;
        clause.lhs = esql::AttributeTerm{r_alias, rx};
        clause.op = esql::Comparator::Eq;
        clause.rhs = esql::AttributeTerm{s_alias, sy};
        return clause;
    };
    if (pc) {
        for (const auto& [rx, sy] : pc->pairs)
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

std::optional<Step> substitute_relation_step(const wsmkb::Store& mkb, const SchemaSet& post,
                                             const ViewDefinition& view, const std::string& alias,
                                             const RelationRef& s, ExtentRelation theta) {
    const esql::FromItem* binding = view.find_alias(alias);
    if (!binding) return std::nullopt;
    const RelationRef r = binding->relation;
    const std::string fresh = next_alias(alias, view);

    ViewDefinition out = view;
    std::vector<size_t> drop_select, drop_where;

    for (size_t i = 0; i < out.select.size(); ++i) {
        auto& item = out.select[i];
        if (item.attribute.alias != alias) continue;
        auto mapped = map_attribute(mkb, post, r, s, item.attribute.attribute,
                                    item.params.replaceable);
        if (mapped)
            item.attribute = {fresh, *mapped};
        else if (item.params.dispensable)
            drop_select.push_back(i);
        else
            return std::nullopt;
    }
    for (size_t i = 0; i < out.where.size(); ++i) {
        auto& clause = out.where[i];
        if (!term_on_alias(clause.lhs, alias) && !term_on_alias(clause.rhs, alias)) continue;
        esql::PrimitiveClause rewritten = clause;
        bool mappable = true;
        for (esql::Term* term : {&rewritten.lhs, &rewritten.rhs}) {
            auto* attr = std::get_if<esql::AttributeTerm>(term);
            if (!attr || attr->alias != alias) continue;
            auto mapped = map_attribute(mkb, post, r, s, attr->attribute,
                                        clause.params.replaceable);
            if (!mapped) {
                mappable = false;
                break;
            }
            *attr = {fresh, *mapped};
        }
        if (mappable)
            clause = rewritten;
        else if (clause.params.dispensable)
            drop_where.push_back(i);
        else
            return std::nullopt;
    }

    Step step;
    step.extent = rel_sub_extent(theta);
    for (size_t i : drop_select) step.dropped.push_back(describe_select(view.select[i]));
    for (size_t i : drop_where) step.dropped.push_back(describe_clause(view.where[i]));
    for (auto it = drop_select.rbegin(); it != drop_select.rend(); ++it)
        out.select.erase(out.select.begin() + static_cast<long>(*it));
    for (auto it = drop_where.rbegin(); it != drop_where.rend(); ++it)
        out.where.erase(out.where.begin() + static_cast<long>(*it));
    if (!drop_select.empty()) step.extent = meet(step.extent, ExtentRelation::Indifferent);
    if (!drop_where.empty()) step.extent = meet(step.extent, ExtentRelation::Superset);

    for (auto& item : out.from) {
        if (item.alias == alias) {
            item.relation = s;
            item.alias = fresh;
            break;
        }
    }
    if (out.select.empty() || !view_valid(out, post)) return std::nullopt;
    step.view = std::move(out);
    return step;
}

std::optional<Step> drop_relation_step(const SchemaSet& post, const ViewDefinition& view,
                                       const std::string& alias) {
    const esql::FromItem* binding = view.find_alias(alias);
    if (!binding) return std::nullopt;

    Step step;
    step.extent = ExtentRelation::Superset;
    step.dropped.push_back(describe_from(*binding));
    bool dropped_select = false, dropped_where = false;
    for (const auto& item : view.select) {
        if (item.attribute.alias != alias) continue;
        if (!item.params.dispensable) return std::nullopt;
        step.dropped.push_back(describe_select(item));
        dropped_select = true;
    }
    for (const auto& clause : view.where) {
        if (!term_on_alias(clause.lhs, alias) && !term_on_alias(clause.rhs, alias)) continue;
        if (!clause.params.dispensable) return std::nullopt;
        step.dropped.push_back(describe_clause(clause));
        dropped_where = true;
    }

    ViewDefinition out = view;
    std::erase_if(out.select,
                  [&](const esql::SelectItem& item) { return item.attribute.alias == alias; });
    std::erase_if(out.where, [&](const esql::PrimitiveClause& clause) {
        return term_on_alias(clause.lhs, alias) || term_on_alias(clause.rhs, alias);
    });
    std::erase_if(out.from, [&](const esql::FromItem& item) { return item.alias == alias; });
    if (out.select.empty() || out.from.empty()) return std::nullopt;
    if (dropped_select) step.extent = meet(step.extent, ExtentRelation::Indifferent);
    if (dropped_where) step.extent = meet(step.extent, ExtentRelation::Superset);
    if (!view_valid(out, post)) return std::nullopt;
    step.view = std::move(out);
    return step;
}

std::optional<Step> substitute_attribute_step(const wsmkb::Store& mkb, const SchemaSet& post,
                                              const ViewDefinition& view, const AttributeRef& a,
                                              const AttributeRef& b) {
    std::set<std::string> bound;
    for (const auto& item : view.from)
        if (item.relation == a.relation()) bound.insert(item.alias);

    auto matches = [&](const esql::AttributeTerm& attr) {
        return attr.attribute == a.attribute_name && bound.count(attr.alias) > 0;
    };

    std::vector<std::string> aliases;
    for (const auto& item : view.from) {
        if (!bound.count(item.alias)) continue;
        bool used = false;
        for (const auto& sel : view.select)
            if (sel.attribute.alias == item.alias && matches(sel.attribute)) used = true;
        for (const auto& clause : view.where)
            for (const esql::Term* term : {&clause.lhs, &clause.rhs})
                if (const auto* attr = std::get_if<esql::AttributeTerm>(term))
                    if (attr->alias == item.alias && matches(*attr)) used = true;
        if (used) aliases.push_back(item.alias);
    }
    if (aliases.empty()) return std::nullopt;

    auto pc = best_pc(mkb, a.relation(), b.relation());
    ExtentRelation sub_extent =
        attr_sub_extent(pc ? std::optional<ExtentRelation>(pc->theta) : std::nullopt);

    ViewDefinition out = view;
    Step step;
    std::set<size_t> drop_where;
    bool substituted = false;

    for (const std::string& alias : aliases) {
        std::vector<size_t> sel, cls;
        for (size_t i = 0; i < view.select.size(); ++i)
            if (view.select[i].attribute.alias == alias && matches(view.select[i].attribute))
                sel.push_back(i);
        for (size_t i = 0; i < view.where.size(); ++i) {
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
            fresh = next_alias(alias, out);
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
            if (auto join = linking_join(mkb, post, pc, a.relation(), b.relation(), alias, fresh))
                out.where.push_back(*join);
        }
    }

    step.extent = substituted ? sub_extent : ExtentRelation::Equivalent;
    for (size_t i : drop_where) step.dropped.push_back(describe_clause(view.where[i]));
    for (auto it = drop_where.rbegin(); it != drop_where.rend(); ++it)
        out.where.erase(out.where.begin() + static_cast<long>(*it));
    if (!drop_where.empty()) step.extent = meet(step.extent, ExtentRelation::Superset);
    if (out.select.empty() || !view_valid(out, post)) return std::nullopt;
    step.view = std::move(out);
    return step;
}

std::optional<Step> drop_attribute_step(const SchemaSet& post, const ViewDefinition& view,
                                        const AttributeRef& a) {
    std::set<std::string> bound;
    for (const auto& item : view.from)
        if (item.relation == a.relation()) bound.insert(item.alias);
    auto matches = [&](const esql::AttributeTerm& attr) {
        return attr.attribute == a.attribute_name && bound.count(attr.alias) > 0;
    };

    std::vector<size_t> sel, cls;
    for (size_t i = 0; i < view.select.size(); ++i)
        if (matches(view.select[i].attribute)) sel.push_back(i);
    for (size_t i = 0; i < view.where.size(); ++i) {
        const auto& clause = view.where[i];
        bool hit = false;
        for (const esql::Term* term : {&clause.lhs, &clause.rhs})
            if (const auto* attr = std::get_if<esql::AttributeTerm>(term))
                if (matches(*attr)) hit = true;
        if (hit) cls.push_back(i);
    }
    if (sel.empty() && cls.empty()) return std::nullopt;

    Step step;
    for (size_t i : sel) {
        if (!view.select[i].params.dispensable) return std::nullopt;
        step.dropped.push_back(describe_select(view.select[i]));
    }
    for (size_t i : cls) {
        if (!view.where[i].params.dispensable) return std::nullopt;
        step.dropped.push_back(describe_clause(view.where[i]));
    }

    ViewDefinition out = view;
    for (auto it = sel.rbegin(); it != sel.rend(); ++it)
        out.select.erase(out.select.begin() + static_cast<long>(*it));
    for (auto it = cls.rbegin(); it != cls.rend(); ++it)
        out.where.erase(out.where.begin() + static_cast<long>(*it));
    if (out.select.empty()) return std::nullopt;
    step.extent = ExtentRelation::Equivalent;
    if (!sel.empty()) step.extent = meet(step.extent, ExtentRelation::Indifferent);
    if (!cls.empty()) step.extent = meet(step.extent, ExtentRelation::Superset);
    if (!view_valid(out, post)) return std::nullopt;
    step.view = std::move(out);
    return step;
}

sync::ViewOutcome to_outcome(const Step& step) {
    return sync::Rewritten{step.view, step.extent, step.dropped};
}

void push_unique(std::vector<sync::ViewOutcome>& outcomes, sync::ViewOutcome outcome) {
    for (const auto& existing : outcomes)
        if (existing == outcome) return;
    outcomes.push_back(std::move(outcome));
}

} // namespace

void InstanceSpec::validate() const {
    for (int bound : {max_sources, max_relations_per_source, max_attributes_per_relation,
                      max_join_constraints, max_pc_constraints, max_views,
                      max_clauses_per_view}) {
        if (bound <= 0)
            throw Error(ErrorCode::InvariantViolation, "instance bounds must be positive");
    }
}

OutcomeSet enumerate_outcomes(const wsmkb::Store& mkb, const esql::ViewDefinition& view,
                              const ChangeEvent& event, const InstanceSpec& spec) {
    spec.validate();
    auto bounds_fail = [](const std::string& what) -> void {
        throw Error(ErrorCode::BoundsExceeded, what);
    };
    if (mkb.schemas().size() > static_cast<size_t>(spec.max_sources))
        bounds_fail("too many sources");
    for (const auto& [id, source] : mkb.schemas()) {
        if (source.relations.size() > static_cast<size_t>(spec.max_relations_per_source))
            bounds_fail("too many relations in source " + id);
        for (const auto& rel : source.relations)
            if (rel.attributes.size() > static_cast<size_t>(spec.max_attributes_per_relation))
                bounds_fail("too many attributes in " + id + "." + rel.name);
    }
    if (mkb.join_constraints().size() > static_cast<size_t>(spec.max_join_constraints))
        bounds_fail("too many join constraints");
    if (mkb.pc_constraints().size() > static_cast<size_t>(spec.max_pc_constraints))
        bounds_fail("too many pc constraints");
    if (view.where.size() > static_cast<size_t>(spec.max_clauses_per_view))
        bounds_fail("too many clauses in view " + view.name);
    {
        std::set<RelationRef> seen;
        for (const auto& item : view.from)
            if (!seen.insert(item.relation).second)
                bounds_fail("view " + view.name + " binds " + item.relation.str() + " twice");
    }

    const SchemaSet post = apply_change(mkb.schemas(), event);
    OutcomeSet result;

    if (const auto* da = std::get_if<DeleteAttribute>(&event)) {
        const AttributeRef& a = da->attribute;
        std::set<std::string> bound;
        for (const auto& item : view.from)
            if (item.relation == a.relation()) bound.insert(item.alias);
        auto matches = [&](const esql::AttributeTerm& attr) {
            return attr.attribute == a.attribute_name && bound.count(attr.alias) > 0;
        };
        std::vector<size_t> sel, cls;
        for (size_t i = 0; i < view.select.size(); ++i)
            if (matches(view.select[i].attribute)) sel.push_back(i);
        for (size_t i = 0; i < view.where.size(); ++i) {
            bool hit = false;
            for (const esql::Term* term : {&view.where[i].lhs, &view.where[i].rhs})
                if (const auto* attr = std::get_if<esql::AttributeTerm>(term))
                    if (matches(*attr)) hit = true;
            if (hit) cls.push_back(i);
        }
        if (sel.empty() && cls.empty()) {
            result.outcomes.push_back(sync::Unchanged{});
            return result;
        }
        const esql::EvolutionParams dispatch =
            !sel.empty() ? view.select[sel.front()].params : view.where[cls.front()].params;

        using Key = std::tuple<int, std::string, std::string, std::string>;
        std::optional<Key> best_key;
        std::optional<sync::ViewOutcome> best_outcome;
        std::vector<sync::ViewOutcome> legal;
        if (dispatch.replaceable) {
            for (const AttributeRef& b : attribute_candidates(mkb, post, a)) {
                auto step = substitute_attribute_step(mkb, post, view, a, b);
                if (!step || !ve_ok(view.ve, step->extent)) continue;
                Key key{rank_of(view.ve, step->extent), b.source_id, b.relation_name,
                        b.attribute_name};
                auto outcome = to_outcome(*step);
                if (!best_key || key < *best_key) {
                    best_key = key;
                    best_outcome = outcome;
                }
                push_unique(legal, std::move(outcome));
            }
        }
        if (!legal.empty()) {
            result.outcomes = std::move(legal);
            for (size_t i = 0; i < result.outcomes.size(); ++i)
                if (result.outcomes[i] == *best_outcome) result.best = i;
            return result;
        }
        if (dispatch.dispensable) {
            auto step = drop_attribute_step(post, view, a);
            if (step && ve_ok(view.ve, step->extent)) {
                result.outcomes.push_back(to_outcome(*step));
                return result;
            }
        }
        result.outcomes.push_back(sync::Failed{});
        return result;
    }

    const RelationRef& r = std::get<DeleteRelation>(event).relation;
    const esql::FromItem* binding = nullptr;
    for (const auto& item : view.from) {
        if (item.relation == r) {
            binding = &item;
            break;
        }
    }
    if (!binding) {
        result.outcomes.push_back(sync::Unchanged{});
        return result;
    }
    const esql::EvolutionParams dispatch = binding->params;
    const std::string alias = binding->alias;

    using Key = std::tuple<int, std::string, std::string, int>;
    std::optional<Key> best_key;
    std::optional<sync::ViewOutcome> best_outcome;
    std::vector<sync::ViewOutcome> legal;
    if (dispatch.replaceable) {
        for (const auto& [s, theta] : relation_candidates(mkb, post, r)) {
            auto step = substitute_relation_step(mkb, post, view, alias, s, theta);
            if (!step || !ve_ok(view.ve, step->extent)) continue;
            Key key{rank_of(view.ve, step->extent), s.source_id, s.relation_name,
                    static_cast<int>(theta)};
            auto outcome = to_outcome(*step);
            if (!best_key || key < *best_key) {
                best_key = key;
                best_outcome = outcome;
            }
            push_unique(legal, std::move(outcome));
        }
    }
    if (!legal.empty()) {
        result.outcomes = std::move(legal);
        for (size_t i = 0; i < result.outcomes.size(); ++i)
            if (result.outcomes[i] == *best_outcome) result.best = i;
        return result;
    }
    if (dispatch.dispensable) {
        auto step = drop_relation_step(post, view, alias);
        if (step && ve_ok(view.ve, step->extent)) {
            result.outcomes.push_back(to_outcome(*step));
            return result;
        }
    }
    result.outcomes.push_back(sync::Failed{});
    return result;
}

// ---------------------------------------------------------------------
// Instance generation
// ---------------------------------------------------------------------

namespace {

struct NamePool {
    const char* name;
    TypeDomain type;
};

constexpr NamePool kAttributePool[] = {
    {"A", TypeDomain::Number}, {"B", TypeDomain::String}, {"C", TypeDomain::Date},
    {"D", TypeDomain::Number}, {"E", TypeDomain::String},
};

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    int below(int n) { return n <= 1 ? 0 : static_cast<int>(engine_() % n); }
    int range(int lo, int hi) { return lo + below(hi - lo + 1); } // inclusive
    bool chance(int percent) { return below(100) < percent; }

  private:
    std::mt19937_64 engine_;
};

esql::Term literal_for(TypeDomain type, Rng& rng) {
    switch (type) {
        case TypeDomain::Number: return esql::NumberLiteral{static_cast<double>(rng.below(100))};
        case TypeDomain::String: {
            static const char* words[] = {"x", "y", "Cardiologist", "Tunis"};
            return esql::StringLiteral{words[rng.below(4)]};
        }
        case TypeDomain::Date: {
            char buf[11];
            std::snprintf(buf, sizeof(buf), "20%02d-%02d-%02d", rng.range(10, 25),
                          rng.range(1, 12), rng.range(1, 28));
            return esql::DateLiteral{buf};
        }
    }
    return esql::NumberLiteral{0};
}

} // namespace

Instance generate_instance(std::uint64_t seed, const InstanceSpec& spec) {
    spec.validate();
    Rng rng(seed);
    Instance instance;

    // Sources and their type constraints. Attribute types are a fixed
    // function of the pool name, so every JC/PC the generator assembles is
    // type-valid by construction.
    const int pool_size = static_cast<int>(std::size(kAttributePool));
    const int n_sources = rng.range(1, spec.max_sources);
    std::vector<RelationRef> all_relations;
    for (int si = 1; si <= n_sources; ++si) {
        SourceSchema source;
        source.source_id = "S" + std::to_string(si);
        const int n_relations = rng.range(1, spec.max_relations_per_source);
        for (int ri = 1; ri <= n_relations; ++ri) {
            RelationSchema relation;
            relation.name = "R" + std::to_string(ri);
            const int n_attrs = rng.range(std::min(2, spec.max_attributes_per_relation),
                                          std::min(pool_size, spec.max_attributes_per_relation));
            std::vector<int> order(pool_size);
            for (int i = 0; i < pool_size; ++i) order[i] = i;
            for (int i = pool_size - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
            for (int i = 0; i < n_attrs; ++i)
                relation.attributes.emplace_back(kAttributePool[order[i]].name,
                                                 kAttributePool[order[i]].type);
            all_relations.push_back({source.source_id, relation.name});
            source.relations.push_back(std::move(relation));
        }
        instance.mkb.add(source);
    }
    for (const auto& rel : all_relations) {
        wsmkb::TypeIntegrityConstraint tc;
        tc.relation = rel;
        for (const auto& [name, type] : instance.mkb.find_relation(rel)->attributes)
            tc.typing.emplace(name, type);
        instance.mkb.add(tc);
    }

    const int total_relations = static_cast<int>(all_relations.size());

    // Join constraints over same-type attribute pairs.
    if (total_relations >= 2) {
        const int target = rng.range(0, spec.max_join_constraints);
        for (int k = 0; k < target; ++k) {
            int li = rng.below(total_relations);
            int ri = rng.below(total_relations);
            if (li == ri) continue;
            const RelationRef& left = all_relations[li];
            const RelationRef& right = all_relations[ri];
            const RelationSchema* ls = instance.mkb.find_relation(left);
            const RelationSchema* rs = instance.mkb.find_relation(right);
            std::vector<std::pair<std::string, std::string>> options;
            for (const auto& [ln, lt] : ls->attributes)
                for (const auto& [rn, rt] : rs->attributes)
                    if (lt == rt) options.emplace_back(ln, rn);
            if (options.empty()) continue;
            wsmkb::JoinConstraint jc;
            jc.left = left;
            jc.right = right;
            const int n_eq = rng.range(1, std::min(2, static_cast<int>(options.size())));
            std::set<int> chosen;
            for (int e = 0; e < n_eq; ++e) chosen.insert(rng.below(static_cast<int>(options.size())));
            for (int idx : chosen) jc.equalities.push_back(options[idx]);
            instance.mkb.add(jc);
        }
    }

    // Partial/complete constraints over aligned same-type projections.
    if (total_relations >= 2) {
        const int target = rng.range(0, spec.max_pc_constraints);
        for (int k = 0; k < target; ++k) {
            int li = rng.below(total_relations);
            int ri = rng.below(total_relations);
            if (li == ri) continue;
            const RelationRef& left = all_relations[li];
            const RelationRef& right = all_relations[ri];
            const RelationSchema* ls = instance.mkb.find_relation(left);
            const RelationSchema* rs = instance.mkb.find_relation(right);
            wsmkb::PCConstraint pc;
            pc.left.relation = left;
            pc.right.relation = right;
            std::set<std::string> used_right;
            for (const auto& [ln, lt] : ls->attributes) {
                std::optional<std::string> match;
                for (const auto& [rn, rt] : rs->attributes)
                    if (rt == lt && !used_right.count(rn) && !match) match = rn;
                if (!match) continue;
                pc.left.projection.push_back(ln);
                pc.right.projection.push_back(*match);
                used_right.insert(*match);
            }
            if (pc.left.projection.empty()) continue;
            switch (rng.below(3)) {
                case 0: pc.theta = ExtentRelation::Subset; break;
                case 1: pc.theta = ExtentRelation::Superset; break;
                default: pc.theta = ExtentRelation::Equivalent; break;
            }
            if (rng.chance(10)) { // stored but never matched
                const auto& [an, at] = ls->attributes[rng.below(static_cast<int>(ls->attributes.size()))];
                esql::PrimitiveClause sel;
                sel.lhs = esql::AttributeTerm{left.relation_name, an};
                sel.op = esql::Comparator::Eq;
                sel.rhs = literal_for(at, rng);
                pc.left.selection.push_back(std::move(sel));
            }
            instance.mkb.add(pc);
        }
    }

    // Views.
    const int n_views = rng.range(1, spec.max_views);
    std::vector<std::string> view_ids;
    for (int vi = 1; vi <= n_views; ++vi) {
        esql::ViewDefinition view;
        view.name = "V" + std::to_string(vi);
        switch (rng.below(4)) {
            case 0: view.ve = ExtentRelation::Equivalent; break;
            case 1: view.ve = ExtentRelation::Superset; break;
            case 2: view.ve = ExtentRelation::Subset; break;
            default: view.ve = ExtentRelation::Indifferent; break;
        }
        const int n_from = rng.range(1, std::min(2, total_relations));
        std::set<int> picked;
        while (static_cast<int>(picked.size()) < n_from) picked.insert(rng.below(total_relations));
        int alias_no = 1;
        for (int idx : picked) {
            esql::FromItem item;
            item.relation = all_relations[idx];
            item.alias = "T" + std::to_string(alias_no++);
            item.params = {rng.chance(45), rng.chance(55)};
            view.from.push_back(std::move(item));
        }
        auto random_attribute = [&]() {
            const esql::FromItem& item = view.from[rng.below(static_cast<int>(view.from.size()))];
            const RelationSchema* rel = instance.mkb.find_relation(item.relation);
            const auto& attr = rel->attributes[rng.below(static_cast<int>(rel->attributes.size()))];
            return std::make_pair(esql::AttributeTerm{item.alias, attr.first}, attr.second);
        };
        const int n_select = rng.range(1, 3);
        for (int i = 0; i < n_select; ++i) {
            esql::SelectItem item;
            item.attribute = random_attribute().first;
            item.params = {rng.chance(45), rng.chance(55)};
            view.select.push_back(std::move(item));
        }
        const int n_where = rng.range(0, spec.max_clauses_per_view);
        for (int i = 0; i < n_where; ++i) {
            esql::PrimitiveClause clause;
            auto [lhs, lhs_type] = random_attribute();
            clause.lhs = lhs;
            static const esql::Comparator comparators[] = {
                esql::Comparator::Eq, esql::Comparator::Ne, esql::Comparator::Lt,
                esql::Comparator::Le, esql::Comparator::Gt, esql::Comparator::Ge,
            };
            clause.op = rng.chance(80) ? esql::Comparator::Eq : comparators[rng.below(6)];
            if (rng.chance(40)) {
                auto [rhs, rhs_type] = random_attribute();
                if (rhs_type == lhs_type && !(rhs == lhs))
                    clause.rhs = rhs;
                else
                    clause.rhs = literal_for(lhs_type, rng);
            } else {
                clause.rhs = literal_for(lhs_type, rng);
            }
            clause.params = {rng.chance(45), rng.chance(55)};
            view.where.push_back(std::move(clause));
        }
        wsvkb::ViewRecord record;
        record.view_id = view.name;
        record.original_text = esql::print_view(view);
        record.definition = std::move(view);
        instance.vkb.add_view(record, instance.mkb);
        view_ids.push_back(record.view_id);
    }

    // Web services over the views, sources derived from the views.
    const int n_ws = rng.range(1, 2);
    std::vector<std::vector<std::string>> assignment(n_ws);
    for (size_t i = 0; i < view_ids.size(); ++i) assignment[rng.below(n_ws)].push_back(view_ids[i]);
    std::vector<std::string> ws_ids;
    for (int w = 0; w < n_ws; ++w) {
        if (assignment[w].empty()) continue;
        WebService ws;
        ws.ws_id = "W" + std::to_string(w + 1);
        ws.view_ids = assignment[w];
        for (const auto& view_id : ws.view_ids)
            for (const auto& item : instance.vkb.view(view_id).definition.from)
                ws.source_ids.insert(item.relation.source_id);
        instance.mkb.add(ws);
        instance.vkb.set_ws_views(ws.ws_id, ws.view_ids);
        ws_ids.push_back(ws.ws_id);
    }
    for (const auto& ws_id : ws_ids) {
        if (!rng.chance(50)) continue;
        wsmkb::ReplacementRule rule;
        rule.ws_id = ws_id;
        for (const auto& other : ws_ids)
            if (other != ws_id) rule.substitutes.push_back(other);
        if (!rule.substitutes.empty()) instance.mkb.add(rule);
    }

    // Deletion event: prefer components the views actually reference.
    std::set<AttributeRef> referenced_attrs;
    std::set<RelationRef> referenced_rels;
    for (const auto& view_id : view_ids) {
        const auto& view = instance.vkb.view(view_id).definition;
        for (const auto& item : view.from) referenced_rels.insert(item.relation);
        auto note = [&](const esql::AttributeTerm& attr) {
            const esql::FromItem* item = view.find_alias(attr.alias);
            referenced_attrs.insert(
                {item->relation.source_id, item->relation.relation_name, attr.attribute});
        };
        for (const auto& item : view.select) note(item.attribute);
        for (const auto& clause : view.where)
            for (const esql::Term* term : {&clause.lhs, &clause.rhs})
                if (const auto* attr = std::get_if<esql::AttributeTerm>(term)) note(*attr);
    }
    std::vector<ChangeEvent> candidates;
    auto add_candidates = [&](const std::set<AttributeRef>& attrs,
                              const std::set<RelationRef>& rels) {
        for (const auto& a : attrs) {
            const RelationSchema* rel = instance.mkb.find_relation(a.relation());
            if (rel && rel->attributes.size() >= 2) candidates.push_back(DeleteAttribute{a});
        }
        for (const auto& r : rels) candidates.push_back(DeleteRelation{r});
    };
    if (rng.chance(80) && (!referenced_attrs.empty() || !referenced_rels.empty())) {
        add_candidates(referenced_attrs, referenced_rels);
    }
    if (candidates.empty()) {
        std::set<AttributeRef> attrs;
        std::set<RelationRef> rels;
        for (const auto& [sid, source] : instance.mkb.schemas())
            for (const auto& rel : source.relations) {
                rels.insert({sid, rel.name});
                for (const auto& [an, at] : rel.attributes) attrs.insert({sid, rel.name, an});
            }
        add_candidates(attrs, rels);
    }
    instance.event = candidates[rng.below(static_cast<int>(candidates.size()))];
    return instance;
}

} // namespace vsync::oracle
