from .model import (
    Agg,
    BinOp,
    CmpOp,
    CyclicDefinitionError,
    Definition,
    DuplicateName,
    Expr,
    First,
    FreeIndexError,
    IfExpr,
    IndexRef,
    ModelError,
    Num,
    ParamDecl,
    ParamRef,
    SetDecl,
    ShadowModelIR,
    UnaryOp,
    UnknownIndex,
    UnknownParam,
    UnknownSet,
    print_expr,
    print_model,
)
from .parser import (
    IncludeCycle,
    IncludeIoError,
    ModelSyntaxError,
    include_resolve,
    load_model,
    parse_model,
)
from .eval import (
    ArityMismatch,
    AssignToDefined,
    DataError,
    DataStore,
    EmptyAggregate,
    ShadowDivideByZero,
    ShadowTypeError,
    StaleValue,
    UnknownElement,
    evaluate,
    load_data,
    load_data_file,
    parse_data_text,
    query,
    set_input,
    unused_inputs,
)
