//! Abstract syntax tree for the Java-like subset.

/// A parsed compilation unit: one file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceUnit {
    /// Declared package, dotted; empty when the file has no package clause.
    pub package: String,
    /// Imports in declaration order.
    pub imports: Vec<Import>,
    /// Top-level classes in declaration order.
    pub classes: Vec<ClassDecl>,
}

/// A single import declaration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Import {
    /// The dotted path, without any trailing `.*`.
    pub path: String,
    /// Whether the import ends in `.*`.
    pub wildcard: bool,
}

/// A class with its methods. Fields and nested types are outside the subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDecl {
    pub name: String,
    pub methods: Vec<MethodDecl>,
}

/// A method (or constructor, in which case the name equals the class name).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodDecl {
    pub name: String,
    /// `(type, name)` pairs in declaration order.
    pub params: Vec<(String, String)>,
    pub body: Vec<Statement>,
}

/// A statement inside a method body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Statement {
    /// `T x = init;`, `T x;`, or `var x = init;` (`var` requires `init`).
    VarDecl {
        /// Declared type name, or `"var"` for inferred declarations.
        type_name: String,
        name: String,
        init: Option<Expr>,
    },
    /// A call or constructor invocation, optionally assigned to an existing
    /// variable: `x = a.b();`, `a.b();`, `new T(..);`.
    ExprStmt {
        /// Assignment target, when present. Must already be declared.
        target: Option<String>,
        expr: Expr,
    },
    /// `if (cond) { .. }` — no `else` branch in the subset.
    If { cond: Cond, then_block: Vec<Statement> },
    /// `try { .. } finally { .. }` — no catch clauses in the subset.
    TryFinally { body: Vec<Statement>, finalizer: Vec<Statement> },
    /// `return;` or `return x;` / `return 0;`.
    Return { value: Option<Arg> },
}

/// An `if` condition: either a call or a bare variable reference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cond {
    Call(CallExpr),
    Var(String),
}

/// Right-hand-side expression of a declaration or expression statement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Call(CallExpr),
    New { type_name: String, args: Vec<Arg> },
    /// Literal initializer, stored as written (`5`, `"text"`, `true`, `null`).
    Literal(String),
    /// Initializer that copies another variable: `var y = x;`.
    VarRef(String),
}

/// A method invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CallExpr {
    /// Receiver variable name; `None` for unqualified calls on the enclosing
    /// class.
    pub receiver: Option<String>,
    pub method: String,
    pub args: Vec<Arg>,
}

/// A call argument or `return` operand: a variable or a literal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Arg {
    Var(String),
    Literal(String),
}
