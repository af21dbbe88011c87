// Writes the synthetic silhouettes as PNG files: make_shapes [dir]

#include <silvec/synthetic.hpp>

#include <filesystem>
#include <iostream>

int main(int argc, char** argv) {
  const std::filesystem::path dir = argc > 1 ? argv[1] : "data";
  std::filesystem::create_directories(dir);
  namespace syn = silvec::synthetic;
  auto shapes = syn::evaluation_suite();
  shapes.push_back({"square", syn::square()});
  shapes.push_back({"triangle", syn::triangle()});
  shapes.push_back({"annulus", syn::annulus()});
  shapes.push_back({"two_disks", syn::two_disks()});
  shapes.push_back({"wavy_rectangle", syn::wavy_rectangle()});
  for (const auto& s : shapes) {
    const auto path = dir / (s.name + ".png");
    silvec::write_png(path.string(), s.image);
    std::cout << path.string() << "\n";
  }
}
