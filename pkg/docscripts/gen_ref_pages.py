"""Write one reference page per repairdb module and the literate nav over them."""

from pathlib import Path

import mkdocs_gen_files

nav = mkdocs_gen_files.Nav()

root = Path(__file__).parent.parent
package = root / "src" / "repairdb"

for path in sorted(package.rglob("*.py")):
    module = path.relative_to(package.parent).with_suffix("")
    parts = module.parts
    if parts[-1] == "__main__" or parts[-1].startswith("_") and parts[-1] != "__init__":
        continue

    page = Path(*parts).with_suffix(".md")
    if parts[-1] == "__init__":
        parts = parts[:-1]
        page = page.with_name("index.md")
    nav[parts] = page.as_posix()

    with mkdocs_gen_files.open(Path("reference", page), "w") as fd:
        fd.write(f"::: {'.'.join(parts)}\n")
    mkdocs_gen_files.set_edit_path(Path("reference", page), path.relative_to(root))

with mkdocs_gen_files.open("reference/SUMMARY.md", "w") as nav_file:
    nav_file.writelines(nav.build_literate_nav())
