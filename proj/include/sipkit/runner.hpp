#pragma once

#include "sipkit/transport.hpp"

#include <exception>
#include <thread>
#include <type_traits>
#include <utility>

namespace sipkit {

template <class T>
struct LocalRun {
    T result;
    CostReport cost;                 // verifier side
    std::vector<Frame> transcript;   // verifier side
};

/// Runs verify(Endpoint&) here and prove(Endpoint&) on a second thread over an
/// in-process channel pair. Exceptions from either side propagate.
template <class VerifyFn, class ProveFn>
auto run_local(const PrimeField& field, VerifyFn&& verify, ProveFn&& prove)
    -> LocalRun<std::invoke_result_t<VerifyFn, Endpoint&>> {
    auto [vch, pch] = make_queue_channel_pair();
    std::exception_ptr prover_error;
    std::thread t([&, ch = pch.get()] {
        try {
            Endpoint pe(*ch, Role::Prover, 0, field);
            prove(pe);
        } catch (...) {
            prover_error = std::current_exception();
            ch->close();
        }
    });
    Endpoint ve(*vch, Role::Verifier, 0, field);
    try {
        auto result = verify(ve);
        t.join();
        if (prover_error) std::rethrow_exception(prover_error);
        return {std::move(result), ve.cost(), ve.frames()};
    } catch (const TransportError&) {
        // the prover failing closes the channel; its error is the informative one
        vch->close();
        if (t.joinable()) t.join();
        if (prover_error) std::rethrow_exception(prover_error);
        throw;
    } catch (...) {
        vch->close();
        if (t.joinable()) t.join();
        throw;
    }
}

}  // namespace sipkit
