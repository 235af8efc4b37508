// Concrete landmark types and the abstract kinds they map onto.
#pragma once

#include <string_view>

namespace mmm {

enum class Kind {
    Vertex,
    AdirectionalEdge,
    UnidirectionalEdge,
    BidirectionalEdge,
    Pen,
};

enum class ConcreteType {
    // vertices
    Question,
    Narrative,
    Existence,
    Action,
    Data,
    // adirectional edge
    Relate,
    // unidirectional edges
    Answers,
    Questions,
    Pertains,
    Instantiates,
    Nuances,
    Supports,
    PennedIn,
    Precedes,
    RelatesTo,
    // bidirectional edges
    Equates,
    DiffersFrom,
    // pens
    Definition,
    Reasons,
    Conditions,
    Glossary,
    ExperimentalProtocol,
    Measure,
    Pointer,
    Document,
    DefaultPen,
};

Kind kindOf(ConcreteType t);
std::string_view typeName(ConcreteType t);        // serialized name, e.g. "pennedIn"
ConcreteType typeFromName(std::string_view name); // throws UnknownType
std::string_view kindName(Kind k);
Kind kindFromName(std::string_view name); // throws UnknownType

inline bool isEdgeKind(Kind k) {
    return k == Kind::AdirectionalEdge || k == Kind::UnidirectionalEdge ||
           k == Kind::BidirectionalEdge;
}

inline bool isEdgeType(ConcreteType t) { return isEdgeKind(kindOf(t)); }
inline bool isVertexType(ConcreteType t) { return kindOf(t) == Kind::Vertex; }
inline bool isPenType(ConcreteType t) { return kindOf(t) == Kind::Pen; }

} // namespace mmm
