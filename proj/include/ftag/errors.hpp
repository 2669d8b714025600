#pragma once

#include <stdexcept>
#include <string>

namespace ftag {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define FTAG_DEFINE_ERROR(Name, Base) \
    struct Name : Base {              \
        explicit Name(const std::string& what) : Base(what) {} \
    }

// metric construction / queries
FTAG_DEFINE_ERROR(DisconnectedGraph, Error);
FTAG_DEFINE_ERROR(NonpositiveEdgeLength, Error);
FTAG_DEFINE_ERROR(UnknownVertex, Error);
FTAG_DEFINE_ERROR(InvalidPoint, Error);
FTAG_DEFINE_ERROR(ElapsedOutOfRange, Error);

// instance validation; the specific defects subclass InvalidInstance so
// callers can catch either granularity.
FTAG_DEFINE_ERROR(InvalidInstance, Error);
FTAG_DEFINE_ERROR(NoActiveRobot, InvalidInstance);
FTAG_DEFINE_ERROR(UnsortedReleases, InvalidInstance);
FTAG_DEFINE_ERROR(InvalidHome, InvalidInstance);
FTAG_DEFINE_ERROR(ActiveWithPositiveRelease, InvalidInstance);

// serialization
FTAG_DEFINE_ERROR(ParseError, Error);
FTAG_DEFINE_ERROR(SchemaError, Error);

// offline solver
FTAG_DEFINE_ERROR(TooLarge, Error);
FTAG_DEFINE_ERROR(InconsistentSolution, Error);

// simulation engine
FTAG_DEFINE_ERROR(HorizonExceeded, Error);
FTAG_DEFINE_ERROR(StrategyError, Error);
FTAG_DEFINE_ERROR(TimeOutOfRange, Error);
FTAG_DEFINE_ERROR(NonpositiveOpt, Error);

// strategies
FTAG_DEFINE_ERROR(OptBackendFailure, Error);

// adversary constructions
FTAG_DEFINE_ERROR(KTooLarge, Error);
FTAG_DEFINE_ERROR(CountMismatch, Error);
FTAG_DEFINE_ERROR(NoEmptyCopy, Error);

#undef FTAG_DEFINE_ERROR

}  // namespace ftag
