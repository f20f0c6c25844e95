#!/usr/bin/env python3
"""
门级网表

单元库、门实例与组合电路的数据模型，文本网表的解析与规范化输出，
逻辑求值、4x4 阵列乘法器生成、行划分以及 McCMOS 几何调整。

网表语法（每行一条记录，``#`` 起始注释）::

    celldef NAME inputs=N fn=FN cl=F k=F ipeak=F ileak=F wn=F ln=F
    input NET...
    output NET...
    gate ID CELL in=NET[,NET...] out=NET[,NET] [row=N] [wn=F ln=F]
"""

import dataclasses
import logging
import re
from dataclasses import InitVar, dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from ..config.constants import LogicFunctions
from .base import DomainError, Geometry, NetlistError

logger = logging.getLogger(__name__)

# 十进制或科学计数法，不带单位后缀
_NUMBER_RE = re.compile(r'^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$')
_IDENT_RE = re.compile(r'^[A-Za-z_][A-Za-z0-9_\[\]\.]*$')

_CELLDEF_KEYS = ('inputs', 'fn', 'cl', 'k', 'ipeak', 'ileak', 'wn', 'ln')

_LOGIC = {
    LogicFunctions.AND2: lambda a, b: (a & b,),
    LogicFunctions.HA_SUM: lambda a, b: (a ^ b,),
    LogicFunctions.HA_CARRY: lambda a, b: (a & b,),
    LogicFunctions.FA_SUM: lambda a, b, c: (a ^ b ^ c,),
    LogicFunctions.FA_CARRY: lambda a, b, c: ((a & b) | (a & c) | (b & c),),
    LogicFunctions.BUF: lambda a: (a,),
    LogicFunctions.HA: lambda a, b: (a ^ b, a & b),
    LogicFunctions.FA: lambda a, b, c: (a ^ b ^ c, (a & b) | (a & c) | (b & c)),
}


@dataclass(frozen=True)
class CellDef:
    """单元定义

    Attributes:
        name: 单元名
        n_inputs: 输入个数
        cl: 输出负载电容 (F)
        k: 驱动因子
        i_peak: vST = 0 时的峰值放电电流 (A)
        i_leak_ref: 参考几何尺寸下的待机漏电流 (A)
        geom_n: 代表性 NMOS 的几何尺寸
        logic_fn: 逻辑功能
    """
    name: str
    n_inputs: int
    cl: float
    k: float
    i_peak: float
    i_leak_ref: float
    geom_n: Geometry
    logic_fn: str

    def __post_init__(self):
        if self.logic_fn not in LogicFunctions.ARITY:
            raise DomainError(f"未知逻辑功能: {self.logic_fn}")
        if self.n_inputs not in (1, 2, 3) or self.n_inputs != LogicFunctions.ARITY[self.logic_fn][0]:
            raise DomainError(f"单元 {self.name} 的输入个数 {self.n_inputs} 与功能 {self.logic_fn} 不符")
        for name in ('cl', 'k', 'i_peak', 'i_leak_ref'):
            if not getattr(self, name) > 0:
                raise DomainError(f"单元 {self.name} 的 {name} 必须为正: {getattr(self, name)}")

    @property
    def n_outputs(self) -> int:
        return LogicFunctions.ARITY[self.logic_fn][1]


@dataclass(frozen=True)
class GateInstance:
    """门实例，geom_override 为 McCMOS 调整后的几何尺寸"""
    id: str
    cell: CellDef
    inputs: Tuple[str, ...]
    outputs: Tuple[str, ...]
    row: Optional[int] = None
    geom_override: Optional[Geometry] = None

    def __post_init__(self):
        object.__setattr__(self, 'inputs', tuple(self.inputs))
        object.__setattr__(self, 'outputs', tuple(self.outputs))

    @property
    def geometry(self) -> Geometry:
        return self.geom_override or self.cell.geom_n

    @property
    def drive(self) -> float:
        """有效驱动因子，与宽度成正比"""
        return self.cell.k * self.geometry.w / self.cell.geom_n.w

    @property
    def leakage(self) -> float:
        """待机漏电流，与宽长比成正比"""
        return self.cell.i_leak_ref * self.geometry.aspect / self.cell.geom_n.aspect


@dataclass(frozen=True)
class RowAssignment:
    """门到行的映射"""
    n_rows: int
    mapping: Dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.n_rows < 1:
            raise DomainError(f"行数必须至少为1: {self.n_rows}")
        for gate_id, row in self.mapping.items():
            if not 0 <= row < self.n_rows:
                raise DomainError(f"门 {gate_id} 的行号 {row} 超出 [0, {self.n_rows})")

    def members(self, row: int) -> List[str]:
        """指定行的门，按 id 排序"""
        return sorted(g for g, r in self.mapping.items() if r == row)


def _gate_graph(gates: Sequence[GateInstance]) -> nx.DiGraph:
    drivers = {net: g.id for g in gates for net in g.outputs}
    graph = nx.DiGraph()
    graph.add_nodes_from(g.id for g in gates)
    for g in gates:
        for net in g.inputs:
            if net in drivers:
                graph.add_edge(drivers[net], g.id)
    return graph


def _ordered(graph: nx.DiGraph, lines: Optional[Mapping[str, int]] = None) -> List[str]:
    """Kahn 拓扑排序，同层按 id 字典序；有环时报出一个环"""
    try:
        return list(nx.lexicographical_topological_sort(graph))
    except nx.NetworkXUnfeasible:
        cycle = [u for u, _ in nx.find_cycle(graph)]
        witness = " -> ".join(cycle + [cycle[0]])
        raise NetlistError(f"检测到环路: {witness}", (lines or {}).get(cycle[0]))


def _where(gate_id: str, lines: Mapping[str, int]) -> str:
    if gate_id in lines:
        return f"门 {gate_id} (第{lines[gate_id]}行)"
    return f"门 {gate_id}"


def _check_structure(cells: Mapping[str, CellDef], gates: Sequence[GateInstance],
                     primary_inputs: Sequence[str], primary_outputs: Sequence[str],
                     lines: Optional[Mapping[str, int]] = None):
    """检查电路不变式：单驱动、无悬空、无环、端口个数与单元一致"""
    lines = lines or {}
    if len(set(primary_inputs)) != len(primary_inputs):
        raise NetlistError("主输入存在重复线网")

    drivers: Dict[str, str] = {}
    seen_ids = set()
    for g in gates:
        line = lines.get(g.id)
        if g.id in seen_ids:
            raise NetlistError(f"门 id 重复: {g.id}", line)
        seen_ids.add(g.id)
        if g.cell.name not in cells or cells[g.cell.name] != g.cell:
            raise NetlistError(f"门 {g.id} 引用未定义单元: {g.cell.name}", line)
        if len(g.inputs) != g.cell.n_inputs or len(g.outputs) != g.cell.n_outputs:
            raise NetlistError(
                f"门 {g.id} 端口个数不符: 单元 {g.cell.name} 需要 {g.cell.n_inputs} 输入/"
                f"{g.cell.n_outputs} 输出，实际 {len(g.inputs)}/{len(g.outputs)}", line)
        for net in g.outputs:
            if net in primary_inputs:
                raise NetlistError(f"线网 {net} 存在多个驱动: 主输入与门 {g.id}", line)
            if net in drivers:
                raise NetlistError(
                    f"线网 {net} 存在多个驱动: {_where(drivers[net], lines)} 与 {_where(g.id, lines)}",
                    line)
            drivers[net] = g.id

    available = set(primary_inputs) | set(drivers)
    for g in gates:
        for net in g.inputs:
            if net not in available:
                raise NetlistError(f"门 {g.id} 的输入线网 {net} 悬空", lines.get(g.id))
    for net in primary_outputs:
        if net not in available:
            raise NetlistError(f"主输出 {net} 没有驱动")

    _ordered(_gate_graph(gates), lines)


@dataclass(frozen=True)
class Circuit:
    """组合电路，构造时检查全部结构不变式，门按 id 排序存放"""
    cells: Dict[str, CellDef]
    gates: Tuple[GateInstance, ...]
    primary_inputs: Tuple[str, ...]
    primary_outputs: Tuple[str, ...]
    source_lines: InitVar[Optional[Mapping[str, int]]] = None

    def __post_init__(self, source_lines: Optional[Mapping[str, int]]):
        object.__setattr__(self, 'cells', dict(self.cells))
        object.__setattr__(self, 'primary_inputs', tuple(self.primary_inputs))
        object.__setattr__(self, 'primary_outputs', tuple(self.primary_outputs))
        gates = tuple(self.gates)
        # 按输入顺序检查，错误指向文件中靠前的门
        _check_structure(self.cells, gates, self.primary_inputs, self.primary_outputs, source_lines)
        object.__setattr__(self, 'gates', tuple(sorted(gates, key=lambda g: g.id)))

    @cached_property
    def gate_map(self) -> Dict[str, GateInstance]:
        return {g.id: g for g in self.gates}

    @cached_property
    def driver_map(self) -> Dict[str, str]:
        """线网 → 驱动门 id"""
        return {net: g.id for g in self.gates for net in g.outputs}

    @cached_property
    def graph(self) -> nx.DiGraph:
        """门级有向图，边从驱动门指向读取门"""
        return _gate_graph(self.gates)

    def gate(self, gate_id: str) -> GateInstance:
        try:
            return self.gate_map[gate_id]
        except KeyError:
            raise DomainError(f"电路中没有门: {gate_id}")

    def gate_ids(self) -> List[str]:
        return [g.id for g in self.gates]

    def replace_gates(self, gates: Iterable[GateInstance]) -> 'Circuit':
        return Circuit(self.cells, tuple(gates), self.primary_inputs, self.primary_outputs)


def topological_order(c: Circuit) -> List[str]:
    """门的确定性拓扑序（Kahn 算法，id 字典序打破平局）

    Raises:
        NetlistError: 存在环路，信息中给出一个环
    """
    return _ordered(c.graph)


# ---------------------------------------------------------------------------
# 文本格式
# ---------------------------------------------------------------------------

def _number(text: str, key: str, lineno: int) -> float:
    if not _NUMBER_RE.match(text):
        raise NetlistError(f"字段 {key} 不是合法数值: {text}", lineno)
    return float(text)


def _fields(tokens: Sequence[str], allowed: Sequence[str], lineno: int) -> Dict[str, str]:
    result: Dict[str, str] = {}
    for token in tokens:
        key, sep, value = token.partition('=')
        if not sep or not value:
            raise NetlistError(f"字段格式错误: {token}", lineno)
        if key not in allowed:
            raise NetlistError(f"未知字段: {key}", lineno)
        if key in result:
            raise NetlistError(f"字段重复: {key}", lineno)
        result[key] = value
    return result


def _ident(name: str, what: str, lineno: int) -> str:
    if not _IDENT_RE.match(name):
        raise NetlistError(f"{what}名称不合法: {name}", lineno)
    return name


def _parse_celldef(tokens: Sequence[str], lineno: int) -> CellDef:
    if len(tokens) < 2:
        raise NetlistError("celldef 缺少单元名", lineno)
    name = _ident(tokens[1], "单元", lineno)
    values = _fields(tokens[2:], _CELLDEF_KEYS, lineno)
    missing = [k for k in _CELLDEF_KEYS if k not in values]
    if missing:
        raise NetlistError(f"celldef {name} 缺少字段: {', '.join(missing)}", lineno)
    if not values['inputs'].isdigit():
        raise NetlistError(f"字段 inputs 不是整数: {values['inputs']}", lineno)

    try:
        return CellDef(
            name=name,
            n_inputs=int(values['inputs']),
            cl=_number(values['cl'], 'cl', lineno),
            k=_number(values['k'], 'k', lineno),
            i_peak=_number(values['ipeak'], 'ipeak', lineno),
            i_leak_ref=_number(values['ileak'], 'ileak', lineno),
            geom_n=Geometry(_number(values['wn'], 'wn', lineno), _number(values['ln'], 'ln', lineno)),
            logic_fn=values['fn'],
        )
    except DomainError as e:
        raise NetlistError(str(e), lineno)


def _net_list(text: str, key: str, lineno: int) -> List[str]:
    return [_ident(n, f"{key} 线网", lineno) for n in text.split(',')]


def _parse_gate(tokens: Sequence[str], cells: Mapping[str, CellDef], lineno: int) -> GateInstance:
    if len(tokens) < 3:
        raise NetlistError("gate 记录需要 ID 和单元名", lineno)
    gate_id = _ident(tokens[1], "门", lineno)
    cell_name = tokens[2]
    if cell_name not in cells:
        raise NetlistError(f"门 {gate_id} 引用未定义单元: {cell_name}", lineno)
    cell = cells[cell_name]

    values = _fields(tokens[3:], ('in', 'out', 'row', 'wn', 'ln'), lineno)
    for key in ('in', 'out'):
        if key not in values:
            raise NetlistError(f"门 {gate_id} 缺少字段: {key}", lineno)

    row = None
    if 'row' in values:
        if not values['row'].isdigit():
            raise NetlistError(f"字段 row 不是非负整数: {values['row']}", lineno)
        row = int(values['row'])

    override = None
    if 'wn' in values or 'ln' in values:
        try:
            override = Geometry(
                _number(values['wn'], 'wn', lineno) if 'wn' in values else cell.geom_n.w,
                _number(values['ln'], 'ln', lineno) if 'ln' in values else cell.geom_n.l,
            )
        except DomainError as e:
            raise NetlistError(str(e), lineno)

    return GateInstance(gate_id, cell, _net_list(values['in'], 'in', lineno),
                        _net_list(values['out'], 'out', lineno), row, override)


def parse_netlist(text: str) -> Circuit:
    """解析文本网表

    Args:
        text: 网表文本

    Returns:
        Circuit: 满足全部不变式的电路

    Raises:
        NetlistError: 带行号的解析或结构错误
    """
    cells: Dict[str, CellDef] = {}
    gate_records: List[Tuple[List[str], int]] = []
    primary_inputs: List[str] = []
    primary_outputs: List[str] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split('#', 1)[0].split()
        if not tokens:
            continue
        keyword = tokens[0]
        if keyword == 'celldef':
            cell = _parse_celldef(tokens, lineno)
            if cell.name in cells:
                raise NetlistError(f"单元重复定义: {cell.name}", lineno)
            cells[cell.name] = cell
        elif keyword == 'input':
            primary_inputs.extend(_ident(n, "输入线网", lineno) for n in tokens[1:])
        elif keyword == 'output':
            primary_outputs.extend(_ident(n, "输出线网", lineno) for n in tokens[1:])
        elif keyword == 'gate':
            gate_records.append((tokens, lineno))
        else:
            raise NetlistError(f"未知记录类型: {keyword}", lineno)

    gates = [_parse_gate(tokens, cells, lineno) for tokens, lineno in gate_records]
    lines: Dict[str, int] = {}
    for g, (_, lineno) in zip(gates, gate_records):
        if g.id in lines:
            raise NetlistError(f"门 id 重复: {g.id}", lineno)
        lines[g.id] = lineno
    circuit = Circuit(cells, tuple(gates), tuple(primary_inputs), tuple(primary_outputs), lines)
    logger.debug(f"解析网表: {len(cells)} 个单元, {len(gates)} 个门")
    return circuit


def load_cell_library(text: str) -> Dict[str, CellDef]:
    """读取只含 celldef 记录的单元库文本"""
    cells: Dict[str, CellDef] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split('#', 1)[0].split()
        if not tokens:
            continue
        if tokens[0] != 'celldef':
            raise NetlistError(f"单元库只允许 celldef 记录: {tokens[0]}", lineno)
        cell = _parse_celldef(tokens, lineno)
        if cell.name in cells:
            raise NetlistError(f"单元重复定义: {cell.name}", lineno)
        cells[cell.name] = cell
    return cells


def _celldef_line(cell: CellDef) -> str:
    return (f"celldef {cell.name} inputs={cell.n_inputs} fn={cell.logic_fn} "
            f"cl={cell.cl!r} k={cell.k!r} ipeak={cell.i_peak!r} ileak={cell.i_leak_ref!r} "
            f"wn={cell.geom_n.w!r} ln={cell.geom_n.l!r}")


def write_netlist(c: Circuit) -> str:
    """规范化输出：单元定义、输入、输出、按 id 排序的门"""
    lines = [_celldef_line(c.cells[name]) for name in sorted(c.cells)]
    if c.primary_inputs:
        lines.append("input " + " ".join(c.primary_inputs))
    if c.primary_outputs:
        lines.append("output " + " ".join(c.primary_outputs))
    for g in c.gates:
        record = f"gate {g.id} {g.cell.name} in={','.join(g.inputs)} out={','.join(g.outputs)}"
        if g.row is not None:
            record += f" row={g.row}"
        if g.geom_override is not None:
            record += f" wn={g.geom_override.w!r} ln={g.geom_override.l!r}"
        lines.append(record)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# 求值与生成
# ---------------------------------------------------------------------------

def evaluate(c: Circuit, assignment: Mapping[str, int]) -> Dict[str, int]:
    """按拓扑序做组合逻辑求值

    Args:
        c: 电路
        assignment: 主输入线网 → 0/1

    Returns:
        Dict[str, int]: 主输出线网 → 0/1

    Raises:
        DomainError: 缺少主输入取值
    """
    values: Dict[str, int] = {}
    for net in c.primary_inputs:
        if net not in assignment:
            raise DomainError(f"缺少主输入取值: {net}")
        values[net] = int(assignment[net]) & 1

    for gate_id in topological_order(c):
        g = c.gate_map[gate_id]
        results = _LOGIC[g.cell.logic_fn](*(values[n] for n in g.inputs))
        values.update(zip(g.outputs, results))

    return {net: values[net] for net in c.primary_outputs}


def bus(name: str, width: int) -> List[str]:
    """总线线网名，低位在前: A[0], A[1], ..."""
    return [f"{name}[{i}]" for i in range(width)]


def word_assignment(name: str, value: int, width: int) -> Dict[str, int]:
    """整数按位展开为总线取值"""
    return {net: (value >> i) & 1 for i, net in enumerate(bus(name, width))}


def word_value(bits: Mapping[str, int], name: str, width: int) -> int:
    return sum(bits[net] << i for i, net in enumerate(bus(name, width)))


def generate_multiplier4x4(lib: Mapping[str, CellDef], n_rows: int = 7) -> Circuit:
    """生成 4x4 阵列乘法器

    16 个部分积与门，第 1 行半加器，第 2、3 行全加器阵列，最后一行行波进位。
    门按拓扑分桶打上 n_rows 个行标签。

    Args:
        lib: 单元库，需包含 AND2、HA、FA
        n_rows: 行标签个数

    Returns:
        Circuit: 输入 A[3:0]、B[3:0]，输出 P[7:0]
    """
    missing = [name for name in (LogicFunctions.AND2, LogicFunctions.HA, LogicFunctions.FA)
               if name not in lib]
    if missing:
        raise NetlistError(f"单元库缺少单元: {', '.join(missing)}")
    and2, ha, fa = lib[LogicFunctions.AND2], lib[LogicFunctions.HA], lib[LogicFunctions.FA]

    gates = []
    for i in range(4):
        for j in range(4):
            out = "P[0]" if (i, j) == (0, 0) else f"pp{i}{j}"
            gates.append(GateInstance(f"pp{i}{j}", and2, (f"B[{i}]", f"A[{j}]"), (out,)))

    adders = [
        # 第 1 行: 半加器
        ("r1w1", ha, ("pp01", "pp10"), ("P[1]", "c1_1")),
        ("r1w2", ha, ("pp02", "pp11"), ("s1_2", "c1_2")),
        ("r1w3", ha, ("pp03", "pp12"), ("s1_3", "c1_3")),
        # 第 2、3 行: 进位保留全加器
        ("r2w2", fa, ("s1_2", "pp20", "c1_1"), ("P[2]", "c2_2")),
        ("r2w3", fa, ("s1_3", "pp21", "c1_2"), ("s2_3", "c2_3")),
        ("r2w4", fa, ("pp13", "pp22", "c1_3"), ("s2_4", "c2_4")),
        ("r3w3", fa, ("s2_3", "pp30", "c2_2"), ("P[3]", "c3_3")),
        ("r3w4", fa, ("s2_4", "pp31", "c2_3"), ("s3_4", "c3_4")),
        ("r3w5", fa, ("pp23", "pp32", "c2_4"), ("s3_5", "c3_5")),
        # 最后一行: 行波进位
        ("r4w4", ha, ("s3_4", "c3_3"), ("P[4]", "k4")),
        ("r4w5", fa, ("s3_5", "c3_4", "k4"), ("P[5]", "k5")),
        ("r4w6", fa, ("pp33", "c3_5", "k5"), ("P[6]", "P[7]")),
    ]
    gates.extend(GateInstance(*spec) for spec in adders)

    cells = {name: cell for name, cell in lib.items()}
    circuit = Circuit(cells, tuple(gates), tuple(bus("A", 4) + bus("B", 4)), tuple(bus("P", 8)))
    logger.debug(f"生成 4x4 乘法器: {len(circuit.gates)} 个门")
    return with_rows(circuit, assign_rows(circuit, n_rows))


# ---------------------------------------------------------------------------
# 行划分与 McCMOS
# ---------------------------------------------------------------------------

def assign_rows(c: Circuit, n_rows: int) -> RowAssignment:
    """按拓扑序把门切成 n_rows 个连续且数量均衡的桶"""
    if n_rows < 1:
        raise DomainError(f"行数必须至少为1: {n_rows}")
    order = topological_order(c)
    mapping = {}
    for row, chunk in enumerate(np.array_split(np.array(order, dtype=object), n_rows)):
        for gate_id in chunk:
            mapping[gate_id] = row
    return RowAssignment(n_rows, mapping)


def with_rows(c: Circuit, rows: RowAssignment) -> Circuit:
    """返回带行标签的电路副本"""
    missing = [g.id for g in c.gates if g.id not in rows.mapping]
    if missing:
        raise DomainError(f"行划分未覆盖所有门: {', '.join(missing)}")
    return c.replace_gates(dataclasses.replace(g, row=rows.mapping[g.id]) for g in c.gates)


def row_assignment_from_tags(c: Circuit, n_rows: Optional[int] = None) -> RowAssignment:
    """从门的 row 标签读回行划分"""
    untagged = [g.id for g in c.gates if g.row is None]
    if untagged:
        raise NetlistError(f"以下门没有行标签: {', '.join(untagged)}")
    mapping = {g.id: g.row for g in c.gates}
    rows_needed = max(mapping.values(), default=-1) + 1
    return RowAssignment(n_rows or max(rows_needed, 1), mapping)


def apply_mccmos(c: Circuit, critical_gates: Iterable[str], widen: float = 1.0,
                 lengthen: float = 1.0) -> Circuit:
    """McCMOS 调整：关键门加宽，其余门加长沟道

    Args:
        c: 电路（不会被修改）
        critical_gates: 关键门 id
        widen: 关键门宽度倍数，≥ 1
        lengthen: 非关键门沟道长度倍数，≥ 1

    Returns:
        Circuit: 调整后的新电路
    """
    if widen < 1 or lengthen < 1:
        raise DomainError(f"McCMOS 倍数必须 ≥ 1: widen={widen}, lengthen={lengthen}")
    critical: FrozenSet[str] = frozenset(critical_gates)
    unknown = critical - set(c.gate_map)
    if unknown:
        raise DomainError(f"关键门不在电路中: {', '.join(sorted(unknown))}")

    def adjust(g: GateInstance) -> GateInstance:
        if g.id in critical:
            if widen == 1:
                return g
            return dataclasses.replace(g, geom_override=g.geometry.scaled(widen=widen))
        if lengthen == 1:
            return g
        return dataclasses.replace(g, geom_override=g.geometry.scaled(lengthen=lengthen))

    return c.replace_gates(adjust(g) for g in c.gates)
