//! Translation from parsed methods to usage graphs.
//!
//! Translation rules:
//!
//! * Every parameter and local declaration yields a data node up front,
//!   labelled with its declared type. `var` declarations take their label
//!   from the initializer: the constructed type for `new`, the literal text
//!   for literals, the copied variable's label for variable copies, and
//!   `UNKNOWN` for call results (the subset has no return-type information).
//! * Literal arguments and `return` operands become data nodes labelled with
//!   the literal text exactly as written (string literals keep their
//!   quotes). Within one method, identical literal text shares one node.
//! * A call `r.m(..)` yields an action node labelled `L.m()` where `L` is
//!   the receiver's label; an unqualified call `m(..)` is attributed to the
//!   enclosing class. `new T(..)` yields `T.<init>`, and `return` yields
//!   `<return>`.
//! * Receivers connect to their action with a `recv` edge, arguments with
//!   `para` edges, and assigned results with a `def` edge from the action to
//!   the assigned variable's node.
//! * An `if` whose condition is a call connects that action to every action
//!   inside the then-block (nested ones included) with `sel` edges; a bare
//!   variable condition adds no edges.
//! * `try`/`finally` connects every action of the try block to every action
//!   of the finally block with `finally` edges.
//! * Actions are ordered by textual position: every action gets an `order`
//!   edge to each later action, which is already transitively closed.
//!
//! API attribution resolves a simple type name against the imports: an exact
//! single-type import wins, otherwise the first wildcard import claims the
//! name, otherwise the type stays unresolved (empty API string). Action
//! nodes inherit the API of their receiver (constructors: of the constructed
//! type); unqualified calls and `<return>` stay unresolved.

use std::collections::HashMap;

use crate::graph::{EdgeLabel, UsageGraph, UsageGraphBuilder};

use super::ast::{Arg, CallExpr, Cond, Expr, MethodDecl, SourceUnit, Statement};

/// Label given to call results whose type the subset cannot determine.
const UNKNOWN_LABEL: &str = "UNKNOWN";

/// Error raised when the requested method cannot be translated.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BuildError {
    /// No class in the unit declares a method with the requested name.
    #[error("method `{method}` not found in source unit")]
    MethodNotFound { method: String },
}

/// Resolves a simple type name to its fully qualified name via the unit's
/// imports; returns an empty string when no import covers the name.
pub fn resolve_api(unit: &SourceUnit, simple_name: &str) -> String {
    for import in &unit.imports {
        if !import.wildcard && import.path.rsplit('.').next() == Some(simple_name) {
            return import.path.clone();
        }
    }
    for import in &unit.imports {
        if import.wildcard {
            return format!("{}.{}", import.path, simple_name);
        }
    }
    String::new()
}

/// Builds the usage graph of the first method named `method_name` declared
/// by any class of `unit` (searched in declaration order).
pub fn build_aug(unit: &SourceUnit, method_name: &str) -> Result<UsageGraph, BuildError> {
    for class in &unit.classes {
        if let Some(method) = class.methods.iter().find(|m| m.name == method_name) {
            return Ok(Builder::new(unit, &class.name).translate(method));
        }
    }
    Err(BuildError::MethodNotFound { method: method_name.to_owned() })
}

/// Recovers the source-root directory from a file path and the package the
/// file declares: the package's directory suffix is stripped from the file's
/// directory. Paths use forward slashes; the result keeps a trailing slash.
/// When the directory does not end in the package path the directory itself
/// is returned unchanged (best effort).
pub fn infer_source_root(file_path: &str, package: &str) -> String {
    let dir = file_path.rsplit_once('/').map(|(dir, _)| dir).unwrap_or("");
    let suffix = package.replace('.', "/");
    let root = if !suffix.is_empty() && dir.ends_with(&suffix) {
        &dir[..dir.len() - suffix.len()]
    } else {
        dir
    };
    if root.is_empty() {
        "/".to_owned()
    } else if root.ends_with('/') {
        root.to_owned()
    } else {
        format!("{root}/")
    }
}

#[derive(Clone)]
struct VarInfo {
    node: usize,
    label: String,
    api: String,
}

struct Builder<'a> {
    unit: &'a SourceUnit,
    class_name: &'a str,
    graph: UsageGraphBuilder,
    vars: HashMap<String, VarInfo>,
    constants: HashMap<String, usize>,
    /// Action node indices in textual order.
    actions: Vec<usize>,
}

impl<'a> Builder<'a> {
    fn new(unit: &'a SourceUnit, class_name: &'a str) -> Self {
        Builder {
            unit,
            class_name,
            graph: UsageGraphBuilder::new(String::new()),
            vars: HashMap::new(),
            constants: HashMap::new(),
            actions: Vec::new(),
        }
    }

    fn translate(mut self, method: &MethodDecl) -> UsageGraph {
        let method_id = if self.unit.package.is_empty() {
            format!("{}#{}", self.class_name, method.name)
        } else {
            format!("{}.{}#{}", self.unit.package, self.class_name, method.name)
        };
        self.graph = UsageGraphBuilder::new(method_id);
        for (type_name, name) in &method.params {
            self.declare(name, type_name.clone(), resolve_api(self.unit, type_name));
        }
        self.walk_block(&method.body);
        for (pos, &earlier) in self.actions.iter().enumerate() {
            for &later in &self.actions[pos + 1..] {
                self.graph.add_edge(earlier, later, EdgeLabel::Order);
            }
        }
        self.graph.build()
    }

    fn declare(&mut self, name: &str, label: String, api: String) -> usize {
        let node = self.graph.data(&label, &api);
        self.vars.insert(name.to_owned(), VarInfo { node, label, api });
        node
    }

    fn constant(&mut self, text: &str) -> usize {
        if let Some(&node) = self.constants.get(text) {
            return node;
        }
        let node = self.graph.data(text, "");
        self.constants.insert(text.to_owned(), node);
        node
    }

    fn arg_node(&mut self, arg: &Arg) -> usize {
        match arg {
            Arg::Var(name) => self.vars[name].node,
            Arg::Literal(text) => self.constant(text),
        }
    }

    /// Emits the action node for a call plus its receiver and argument
    /// edges; returns the action index.
    fn call_action(&mut self, call: &CallExpr) -> usize {
        let (label, api, receiver) = match &call.receiver {
            Some(name) => {
                let info = self.vars[name].clone();
                (format!("{}.{}()", info.label, call.method), info.api, Some(info.node))
            }
            None => (format!("{}.{}()", self.class_name, call.method), String::new(), None),
        };
        let action = self.graph.action(label, api);
        self.actions.push(action);
        if let Some(recv) = receiver {
            self.graph.add_edge(recv, action, EdgeLabel::Recv);
        }
        for arg in &call.args {
            let node = self.arg_node(arg);
            self.graph.add_edge(node, action, EdgeLabel::Para);
        }
        action
    }

    /// Emits the action node for a constructor invocation; returns the
    /// action index.
    fn new_action(&mut self, type_name: &str, args: &[Arg]) -> usize {
        let api = resolve_api(self.unit, type_name);
        let action = self.graph.action(format!("{type_name}.<init>"), api);
        self.actions.push(action);
        for arg in args {
            let node = self.arg_node(arg);
            self.graph.add_edge(node, action, EdgeLabel::Para);
        }
        action
    }

    /// Emits the nodes and edges of an initializer or assigned expression
    /// and connects its result to `target` with a `def` edge.
    fn assign_expr(&mut self, expr: &Expr, target: usize) {
        match expr {
            Expr::Call(call) => {
                let action = self.call_action(call);
                self.graph.add_edge(action, target, EdgeLabel::Def);
            }
            Expr::New { type_name, args } => {
                let action = self.new_action(type_name, args);
                self.graph.add_edge(action, target, EdgeLabel::Def);
            }
            // Literal and variable-copy initializers only influence the
            // declared node's label; they add no edges.
            Expr::Literal(_) | Expr::VarRef(_) => {}
        }
    }

    fn walk_block(&mut self, statements: &[Statement]) {
        for statement in statements {
            self.walk_statement(statement);
        }
    }

    fn walk_statement(&mut self, statement: &Statement) {
        match statement {
            Statement::VarDecl { type_name, name, init } => {
                let (label, api) = if type_name == "var" {
                    match init.as_ref().expect("parser requires an initializer for `var`") {
                        Expr::New { type_name, .. } => {
                            (type_name.clone(), resolve_api(self.unit, type_name))
                        }
                        Expr::Call(_) => (UNKNOWN_LABEL.to_owned(), String::new()),
                        Expr::Literal(text) => (text.clone(), String::new()),
                        Expr::VarRef(other) => {
                            let info = &self.vars[other];
                            (info.label.clone(), info.api.clone())
                        }
                    }
                } else {
                    (type_name.clone(), resolve_api(self.unit, type_name))
                };
                let node = self.declare(name, label, api);
                if let Some(expr) = init {
                    self.assign_expr(expr, node);
                }
            }
            Statement::ExprStmt { target, expr } => match target {
                Some(name) => {
                    let node = self.vars[name].node;
                    self.assign_expr(expr, node);
                }
                None => match expr {
                    Expr::Call(call) => {
                        self.call_action(call);
                    }
                    Expr::New { type_name, args } => {
                        self.new_action(type_name, args);
                    }
                    Expr::Literal(_) | Expr::VarRef(_) =>
                        unreachable!("parser only produces calls and constructors here"),
                },
            },
            Statement::If { cond, then_block } => {
                let cond_action = match cond {
                    Cond::Call(call) => Some(self.call_action(call)),
                    Cond::Var(_) => None,
                };
                let start = self.actions.len();
                self.walk_block(then_block);
                if let Some(cond_action) = cond_action {
                    for pos in start..self.actions.len() {
                        let guarded = self.actions[pos];
                        self.graph.add_edge(cond_action, guarded, EdgeLabel::Sel);
                    }
                }
            }
            Statement::TryFinally { body, finalizer } => {
                let body_start = self.actions.len();
                self.walk_block(body);
                let body_end = self.actions.len();
                self.walk_block(finalizer);
                let fin_end = self.actions.len();
                for body_pos in body_start..body_end {
                    for fin_pos in body_end..fin_end {
                        let guarded = self.actions[body_pos];
                        let cleanup = self.actions[fin_pos];
                        self.graph.add_edge(guarded, cleanup, EdgeLabel::Finally);
                    }
                }
            }
            Statement::Return { value } => {
                let action = self.graph.action("<return>", "");
                self.actions.push(action);
                if let Some(arg) = value {
                    let node = self.arg_node(arg);
                    self.graph.add_edge(node, action, EdgeLabel::Para);
                }
            }
        }
    }
}
