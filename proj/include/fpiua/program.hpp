#pragma once

#include <vector>

#include "fpiua/network.hpp"

namespace fpiua {

enum class Op : uint8_t { Const, Add, Mul };

// Slots 0..arity-1 hold the inputs; instruction k writes slot arity+k.
struct Instr {
    Op op;
    uint32_t a = 0, b = 0; // Add/Mul operands
    Fp c;                  // Const value
};

struct Program {
    Format fmt;
    size_t arity = 0;
    std::vector<Instr> code;
    std::vector<uint32_t> outputs;

    size_t slot_count() const { return arity + code.size(); }
    void validate() const;
};

std::vector<Fp> run_program(const Program& p, const std::vector<Fp>& x);
Box run_program_interval(const Program& p, const Box& b);

// Requires the identity activation. Zero-weight columns are dropped unless the
// interval semantics over `domain` says they may be non-finite there; the
// default domain is every non-NaN float.
Program compile_to_program(const Network& n);
Program compile_to_program(const Network& n, const Box& domain);

} // namespace fpiua
