#include "sensebridge/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include "sensebridge/error.hpp"

namespace sensebridge::kernels {

extern const Ops kScalarOps;
#if defined(__x86_64__) || defined(_M_X64)
extern const Ops kAvx2Ops;
#endif

const char* to_string(Isa isa) {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
    }
    return "?";
}

bool supported(Isa isa) {
    switch (isa) {
        case Isa::scalar: return true;
        case Isa::avx2:
#if defined(__x86_64__) || defined(_M_X64)
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma") &&
                   __builtin_cpu_supports("f16c");
#else
            return false;
#endif
    }
    return false;
}

const Ops& ops(Isa isa) {
    switch (isa) {
        case Isa::scalar: return kScalarOps;
        case Isa::avx2:
#if defined(__x86_64__) || defined(_M_X64)
            if (supported(Isa::avx2)) return kAvx2Ops;
#endif
            throw UsageError("avx2 kernels are not available on this CPU/build");
    }
    throw UsageError("unknown kernel ISA");
}

Isa detect_best() {
    return supported(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

namespace {

std::atomic<Isa> g_active{Isa::scalar};
std::atomic<bool> g_initialized{false};

void ensure_initialized() {
    if (g_initialized.load(std::memory_order_acquire)) return;
    Isa isa = detect_best();
    if (const char* env = std::getenv("SENSEBRIDGE_KERNELS")) {
        std::string wanted(env);
        if (wanted == "scalar") {
            isa = Isa::scalar;
        } else if (wanted == "avx2") {
            if (!supported(Isa::avx2)) {
                throw UsageError("SENSEBRIDGE_KERNELS=avx2 but the CPU lacks avx2/fma/f16c");
            }
            isa = Isa::avx2;
        } else if (!wanted.empty()) {
            throw UsageError("SENSEBRIDGE_KERNELS must be 'scalar' or 'avx2', got '" + wanted +
                             "'");
        }
    }
    g_active.store(isa, std::memory_order_release);
    g_initialized.store(true, std::memory_order_release);
}

} // namespace

const Ops& active() {
    ensure_initialized();
    return ops(g_active.load(std::memory_order_acquire));
}

Isa active_isa() {
    ensure_initialized();
    return g_active.load(std::memory_order_acquire);
}

void select(Isa isa) {
    if (!supported(isa)) {
        throw UsageError(std::string("kernel ISA '") + to_string(isa) +
                         "' is not supported on this CPU/build");
    }
    g_active.store(isa, std::memory_order_release);
    g_initialized.store(true, std::memory_order_release);
}

} // namespace sensebridge::kernels
