#include <iostream>

#include "camforge/service.hpp"

int main() {
    std::cout << camforge::render_api_reference();
    return 0;
}
