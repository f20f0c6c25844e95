#!/usr/bin/env python3
"""
一次性复现全部实验结果的脚本

生成 4x4 乘法器网表，复核参考数据，对四种策略做对比并输出可调单元扫描表。
用法: python scripts/reproduce_experiments.py [输出目录]
"""

import sys
from pathlib import Path

# 添加项目路径
project_root = Path(__file__).parent.parent
src_path = project_root / "src"
if str(src_path) not in sys.path:
    sys.path.insert(0, str(src_path))

from pglab.cli.main import main


def reproduce(output_dir: Path) -> int:
    output_dir.mkdir(parents=True, exist_ok=True)
    netlist = str(output_dir / "mult4x4.net")

    steps = [
        ['gen-mult4x4', '-o', netlist],
        ['verify-paper', '--out', str(output_dir / "verify.txt")],
        ['sta', netlist, '--out', str(output_dir / "sta.json")],
        ['compare', netlist, '--out', str(output_dir / "compare.csv")],
        ['sweep', netlist, '--out', str(output_dir / "sweep.csv")],
        ['gate', netlist, '-s', 'dstn', '--out', str(output_dir / "dstn.json"),
         '--rail-out', str(output_dir / "dstn_rail.csv")],
        ['fit', '--out', str(output_dir / "fit.json")],
    ]
    for argv in steps:
        code = main(argv)
        if code != 0:
            print(f"❌ {argv[0]} 失败，退出码 {code}", file=sys.stderr)
            return code
    print(f"✅ 全部结果已写入 {output_dir}")
    return 0


if __name__ == "__main__":
    target = Path(sys.argv[1]) if len(sys.argv) > 1 else project_root / "results"
    sys.exit(reproduce(target))
