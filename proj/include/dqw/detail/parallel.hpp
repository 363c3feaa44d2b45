#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <optional>
#include <thread>
#include <vector>

namespace dqw {

template <typename T>
void ordered_parallel(std::size_t count, int threads, const std::function<T(std::size_t)>& task,
                      const std::function<void(std::size_t, T&&)>& reduce) {
    const std::size_t workers = static_cast<std::size_t>(std::max(threads, 1));
    for (std::size_t begin = 0; begin < count; begin += workers) {
        const std::size_t end = std::min(count, begin + workers);
        std::vector<std::optional<T>> results(end - begin);
        if (end - begin == 1) {
            results[0].emplace(task(begin));
        } else {
            std::vector<std::exception_ptr> errors(end - begin);
            {
                std::vector<std::jthread> pool;
                for (std::size_t i = begin; i < end; ++i)
                    pool.emplace_back([&, i] {
                        try {
                            results[i - begin].emplace(task(i));
                        } catch (...) {
                            errors[i - begin] = std::current_exception();
                        }
                    });
            }
            for (auto& e : errors)
                if (e) std::rethrow_exception(e);
        }
        for (std::size_t i = begin; i < end; ++i) reduce(i, std::move(*results[i - begin]));
    }
}

}  // namespace dqw
