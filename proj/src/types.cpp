#include "mmm/types.hpp"

#include "mmm/error.hpp"

namespace mmm {

Kind kindOf(ConcreteType t) {
    switch (t) {
    case ConcreteType::Question:
    case ConcreteType::Narrative:
    case ConcreteType::Existence:
    case ConcreteType::Action:
    case ConcreteType::Data:
        return Kind::Vertex;
    case ConcreteType::Relate:
        return Kind::AdirectionalEdge;
    case ConcreteType::Answers:
    case ConcreteType::Questions:
    case ConcreteType::Pertains:
    case ConcreteType::Instantiates:
    case ConcreteType::Nuances:
    case ConcreteType::Supports:
    case ConcreteType::PennedIn:
    case ConcreteType::Precedes:
    case ConcreteType::RelatesTo:
        return Kind::UnidirectionalEdge;
    case ConcreteType::Equates:
    case ConcreteType::DiffersFrom:
        return Kind::BidirectionalEdge;
    case ConcreteType::Definition:
    case ConcreteType::Reasons:
    case ConcreteType::Conditions:
    case ConcreteType::Glossary:
    case ConcreteType::ExperimentalProtocol:
    case ConcreteType::Measure:
    case ConcreteType::Pointer:
    case ConcreteType::Document:
    case ConcreteType::DefaultPen:
        return Kind::Pen;
    }
    throw Error(Errc::UnknownType, "unmapped concrete type");
}

std::string_view typeName(ConcreteType t) {
    switch (t) {
    case ConcreteType::Question: return "question";
    case ConcreteType::Narrative: return "narrative";
    case ConcreteType::Existence: return "existence";
    case ConcreteType::Action: return "action";
    case ConcreteType::Data: return "data";
    case ConcreteType::Relate: return "relate";
    case ConcreteType::Answers: return "answers";
    case ConcreteType::Questions: return "questions";
    case ConcreteType::Pertains: return "pertains";
    case ConcreteType::Instantiates: return "instantiates";
    case ConcreteType::Nuances: return "nuances";
    case ConcreteType::Supports: return "supports";
    case ConcreteType::PennedIn: return "pennedIn";
    case ConcreteType::Precedes: return "precedes";
    case ConcreteType::RelatesTo: return "relatesTo";
    case ConcreteType::Equates: return "equates";
    case ConcreteType::DiffersFrom: return "differsFrom";
    case ConcreteType::Definition: return "definition";
    case ConcreteType::Reasons: return "reasons";
    case ConcreteType::Conditions: return "conditions";
    case ConcreteType::Glossary: return "glossary";
    case ConcreteType::ExperimentalProtocol: return "experimentalProtocol";
    case ConcreteType::Measure: return "measure";
    case ConcreteType::Pointer: return "pointer";
    case ConcreteType::Document: return "document";
    case ConcreteType::DefaultPen: return "default";
    }
    throw Error(Errc::UnknownType, "unmapped concrete type");
}

ConcreteType typeFromName(std::string_view name) {
    for (int i = static_cast<int>(ConcreteType::Question);
         i <= static_cast<int>(ConcreteType::DefaultPen); ++i) {
        auto t = static_cast<ConcreteType>(i);
        if (typeName(t) == name)
            return t;
    }
    throw Error(Errc::UnknownType, std::string(name));
}

std::string_view kindName(Kind k) {
    switch (k) {
    case Kind::Vertex: return "vertex";
    case Kind::AdirectionalEdge: return "adirectionalEdge";
    case Kind::UnidirectionalEdge: return "unidirectionalEdge";
    case Kind::BidirectionalEdge: return "bidirectionalEdge";
    case Kind::Pen: return "pen";
    }
    throw Error(Errc::UnknownType, "unmapped kind");
}

Kind kindFromName(std::string_view name) {
    if (name == "vertex") return Kind::Vertex;
    if (name == "adirectionalEdge") return Kind::AdirectionalEdge;
    if (name == "unidirectionalEdge") return Kind::UnidirectionalEdge;
    if (name == "bidirectionalEdge") return Kind::BidirectionalEdge;
    if (name == "pen") return Kind::Pen;
    throw Error(Errc::UnknownType, std::string(name));
}

} // namespace mmm
