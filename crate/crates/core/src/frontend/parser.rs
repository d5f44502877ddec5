//! Recursive-descent parser for the Java-like subset.
//!
//! The parser also enforces the declare-before-use rule for variables: every
//! receiver, argument variable, condition variable, assignment target, and
//! `return` operand must be a parameter or a previously declared local.
//! Declarations are method-scoped (a name declared inside a block stays
//! visible for the rest of the method), which is a deliberate simplification
//! for straight-line usage snippets.

use std::collections::HashSet;

use super::ast::{
    Arg, CallExpr, ClassDecl, Cond, Expr, Import, MethodDecl, SourceUnit, Statement,
};
use super::lexer::{lex, Tok, Token};
use super::ParseError;

/// Modifier keywords that are accepted and ignored before classes, methods,
/// and constructors.
const MODIFIERS: &[&str] =
    &["public", "private", "protected", "static", "final", "abstract", "synchronized"];

/// Parses a full source file.
pub fn parse(src: &str) -> Result<SourceUnit, ParseError> {
    let tokens = lex(src)?;
    let mut parser = Parser { tokens, pos: 0, scope: HashSet::new() };
    parser.unit()
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    /// Names declared so far in the method currently being parsed.
    scope: HashSet<String>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, offset: usize) -> Option<&Tok> {
        self.tokens.get(self.pos + offset).map(|t| &t.tok)
    }

    fn here(&self) -> (u32, u32) {
        self.tokens
            .get(self.pos)
            .or_else(|| self.tokens.last())
            .map(|t| (t.line, t.col))
            .unwrap_or((1, 1))
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        ParseError::Syntax { line, col, message: message.into() }
    }

    fn expect(&mut self, want: &Tok) -> Result<(), ParseError> {
        match self.peek() {
            Some(tok) if tok == want => {
                self.pos += 1;
                Ok(())
            }
            Some(tok) => Err(self.error(format!("expected {}, found {}", want.describe(), tok.describe()))),
            None => Err(self.error(format!("expected {}, found end of input", want.describe()))),
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(name)) => {
                let name = name.clone();
                self.pos += 1;
                Ok(name)
            }
            Some(tok) => Err(self.error(format!("expected {what}, found {}", tok.describe()))),
            None => Err(self.error(format!("expected {what}, found end of input"))),
        }
    }

    fn at_keyword(&self, word: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(name)) if name == word)
    }

    fn eat_keyword(&mut self, word: &str) -> bool {
        if self.at_keyword(word) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    /// `a.b.c` — returns the dotted path.
    fn dotted_path(&mut self, what: &str) -> Result<String, ParseError> {
        let mut path = self.expect_ident(what)?;
        while self.peek() == Some(&Tok::Dot) && matches!(self.peek_at(1), Some(Tok::Ident(_))) {
            self.pos += 1;
            path.push('.');
            path.push_str(&self.expect_ident("identifier")?);
        }
        Ok(path)
    }

    fn unit(&mut self) -> Result<SourceUnit, ParseError> {
        let mut package = String::new();
        if self.eat_keyword("package") {
            package = self.dotted_path("package name")?;
            self.expect(&Tok::Semi)?;
        }
        let mut imports = Vec::new();
        while self.eat_keyword("import") {
            let path = self.dotted_path("import path")?;
            let wildcard = if self.peek() == Some(&Tok::Dot) {
                self.pos += 1;
                self.expect(&Tok::Star)?;
                true
            } else {
                false
            };
            self.expect(&Tok::Semi)?;
            imports.push(Import { path, wildcard });
        }
        let mut classes = Vec::new();
        while self.peek().is_some() {
            classes.push(self.class_decl()?);
        }
        Ok(SourceUnit { package, imports, classes })
    }

    fn skip_modifiers(&mut self) {
        while let Some(Tok::Ident(word)) = self.peek() {
            if MODIFIERS.contains(&word.as_str()) {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn class_decl(&mut self) -> Result<ClassDecl, ParseError> {
        self.skip_modifiers();
        if !self.eat_keyword("class") {
            return Err(self.error("expected `class`"));
        }
        let name = self.expect_ident("class name")?;
        self.expect(&Tok::LBrace)?;
        let mut methods = Vec::new();
        while self.peek() != Some(&Tok::RBrace) {
            if self.peek().is_none() {
                return Err(self.error("expected `}` to close class body"));
            }
            methods.push(self.method_decl(&name)?);
        }
        self.expect(&Tok::RBrace)?;
        Ok(ClassDecl { name, methods })
    }

    fn method_decl(&mut self, class_name: &str) -> Result<MethodDecl, ParseError> {
        self.skip_modifiers();
        let first = self.expect_ident("return type or constructor name")?;
        // `Name(` is a constructor of the enclosing class; `Type name(` is a
        // regular method.
        let name = if self.peek() == Some(&Tok::LParen) {
            if first != class_name {
                return Err(self.error(format!(
                    "constructor name `{first}` does not match class `{class_name}`"
                )));
            }
            first
        } else {
            self.expect_ident("method name")?
        };
        self.expect(&Tok::LParen)?;
        self.scope.clear();
        let mut params = Vec::new();
        if self.peek() != Some(&Tok::RParen) {
            loop {
                let type_name = self.expect_ident("parameter type")?;
                let param_name = self.expect_ident("parameter name")?;
                self.scope.insert(param_name.clone());
                params.push((type_name, param_name));
                if self.peek() == Some(&Tok::Comma) {
                    self.pos += 1;
                } else {
                    break;
                }
            }
        }
        self.expect(&Tok::RParen)?;
        if self.eat_keyword("throws") {
            self.dotted_path("exception type")?;
            while self.peek() == Some(&Tok::Comma) {
                self.pos += 1;
                self.dotted_path("exception type")?;
            }
        }
        let body = self.block()?;
        Ok(MethodDecl { name, params, body })
    }

    fn block(&mut self) -> Result<Vec<Statement>, ParseError> {
        self.expect(&Tok::LBrace)?;
        let mut statements = Vec::new();
        while self.peek() != Some(&Tok::RBrace) {
            if self.peek().is_none() {
                return Err(self.error("expected `}` to close block"));
            }
            statements.push(self.statement()?);
        }
        self.expect(&Tok::RBrace)?;
        Ok(statements)
    }

    fn statement(&mut self) -> Result<Statement, ParseError> {
        if self.at_keyword("if") {
            return self.if_statement();
        }
        if self.at_keyword("try") {
            return self.try_statement();
        }
        if self.at_keyword("return") {
            return self.return_statement();
        }
        if self.at_keyword("new") {
            let expr = self.new_expr()?;
            self.expect(&Tok::Semi)?;
            return Ok(Statement::ExprStmt { target: None, expr });
        }
        if self.at_keyword("var") {
            self.pos += 1;
            let name = self.expect_ident("variable name")?;
            self.expect(&Tok::Assign)?;
            let init = self.init_expr()?;
            self.expect(&Tok::Semi)?;
            self.scope.insert(name.clone());
            return Ok(Statement::VarDecl { type_name: "var".to_owned(), name, init: Some(init) });
        }
        match (self.peek(), self.peek_at(1)) {
            // `Type name ...` — a typed declaration.
            (Some(Tok::Ident(_)), Some(Tok::Ident(_))) => {
                let type_name = self.expect_ident("type")?;
                let name = self.expect_ident("variable name")?;
                let init = if self.peek() == Some(&Tok::Assign) {
                    self.pos += 1;
                    Some(self.init_expr()?)
                } else {
                    None
                };
                self.expect(&Tok::Semi)?;
                self.scope.insert(name.clone());
                Ok(Statement::VarDecl { type_name, name, init })
            }
            // `name = call;` — assignment to an existing variable.
            (Some(Tok::Ident(_)), Some(Tok::Assign)) => {
                let target = self.used_ident("assignment target")?;
                self.pos += 1; // consume `=`
                let expr = self.call_or_new()?;
                self.expect(&Tok::Semi)?;
                Ok(Statement::ExprStmt { target: Some(target), expr })
            }
            // `recv.m(..);` or `m(..);`
            (Some(Tok::Ident(_)), Some(Tok::Dot) | Some(Tok::LParen)) => {
                let call = self.call_expr()?;
                self.expect(&Tok::Semi)?;
                Ok(Statement::ExprStmt { target: None, expr: Expr::Call(call) })
            }
            (Some(tok), _) => Err(self.error(format!("unexpected {} in block", tok.describe()))),
            (None, _) => Err(self.error("unexpected end of input in block")),
        }
    }

    fn if_statement(&mut self) -> Result<Statement, ParseError> {
        self.pos += 1; // `if`
        self.expect(&Tok::LParen)?;
        let cond = match (self.peek(), self.peek_at(1)) {
            (Some(Tok::Ident(_)), Some(Tok::Dot) | Some(Tok::LParen)) => {
                Cond::Call(self.call_expr()?)
            }
            (Some(Tok::Ident(_)), _) => Cond::Var(self.used_ident("condition variable")?),
            _ => return Err(self.error("expected call or variable in condition")),
        };
        self.expect(&Tok::RParen)?;
        let then_block = self.block()?;
        Ok(Statement::If { cond, then_block })
    }

    fn try_statement(&mut self) -> Result<Statement, ParseError> {
        self.pos += 1; // `try`
        let body = self.block()?;
        if !self.eat_keyword("finally") {
            return Err(self.error("expected `finally` after try block"));
        }
        let finalizer = self.block()?;
        Ok(Statement::TryFinally { body, finalizer })
    }

    fn return_statement(&mut self) -> Result<Statement, ParseError> {
        self.pos += 1; // `return`
        let value = if self.peek() == Some(&Tok::Semi) { None } else { Some(self.arg()?) };
        self.expect(&Tok::Semi)?;
        Ok(Statement::Return { value })
    }

    /// Initializer of a declaration: call, `new`, literal, or variable copy.
    fn init_expr(&mut self) -> Result<Expr, ParseError> {
        match (self.peek(), self.peek_at(1)) {
            (Some(Tok::Ident(word)), _) if word == "new" => self.new_expr(),
            (Some(Tok::Ident(_)), Some(Tok::Dot) | Some(Tok::LParen)) => {
                Ok(Expr::Call(self.call_expr()?))
            }
            _ => match self.arg()? {
                Arg::Var(name) => Ok(Expr::VarRef(name)),
                Arg::Literal(text) => Ok(Expr::Literal(text)),
            },
        }
    }

    /// Right-hand side of an assignment statement: call or `new` only.
    fn call_or_new(&mut self) -> Result<Expr, ParseError> {
        if self.at_keyword("new") {
            self.new_expr()
        } else if matches!(
            (self.peek(), self.peek_at(1)),
            (Some(Tok::Ident(_)), Some(Tok::Dot) | Some(Tok::LParen))
        ) {
            Ok(Expr::Call(self.call_expr()?))
        } else {
            Err(self.error("expected call or constructor invocation after `=`"))
        }
    }

    fn new_expr(&mut self) -> Result<Expr, ParseError> {
        self.pos += 1; // `new`
        let type_name = self.expect_ident("type after `new`")?;
        self.expect(&Tok::LParen)?;
        let args = self.arg_list()?;
        Ok(Expr::New { type_name, args })
    }

    fn call_expr(&mut self) -> Result<CallExpr, ParseError> {
        let first = self.expect_ident("identifier")?;
        let (receiver, method) = if self.peek() == Some(&Tok::Dot) {
            self.check_declared(&first)?;
            self.pos += 1;
            (Some(first), self.expect_ident("method name")?)
        } else {
            (None, first)
        };
        self.expect(&Tok::LParen)?;
        let args = self.arg_list()?;
        Ok(CallExpr { receiver, method, args })
    }

    fn arg_list(&mut self) -> Result<Vec<Arg>, ParseError> {
        let mut args = Vec::new();
        if self.peek() != Some(&Tok::RParen) {
            loop {
                args.push(self.arg()?);
                if self.peek() == Some(&Tok::Comma) {
                    self.pos += 1;
                } else {
                    break;
                }
            }
        }
        self.expect(&Tok::RParen)?;
        Ok(args)
    }

    fn arg(&mut self) -> Result<Arg, ParseError> {
        match self.peek() {
            Some(Tok::Number(text)) => {
                let text = text.clone();
                self.pos += 1;
                Ok(Arg::Literal(text))
            }
            Some(Tok::Str(text)) => {
                let text = text.clone();
                self.pos += 1;
                Ok(Arg::Literal(text))
            }
            Some(Tok::Ident(word)) if word == "true" || word == "false" || word == "null" => {
                let text = word.clone();
                self.pos += 1;
                Ok(Arg::Literal(text))
            }
            Some(Tok::Ident(_)) => Ok(Arg::Var(self.used_ident("variable")?)),
            Some(tok) => Err(self.error(format!("expected argument, found {}", tok.describe()))),
            None => Err(self.error("expected argument, found end of input")),
        }
    }

    /// Reads an identifier that must already be declared in the method.
    fn used_ident(&mut self, what: &str) -> Result<String, ParseError> {
        let (line, col) = self.here();
        let name = self.expect_ident(what)?;
        if !self.scope.contains(&name) {
            return Err(ParseError::UseBeforeDeclare { name, line, col });
        }
        Ok(name)
    }

    fn check_declared(&self, name: &str) -> Result<(), ParseError> {
        if self.scope.contains(name) {
            Ok(())
        } else {
            let token = &self.tokens[self.pos - 1];
            Err(ParseError::UseBeforeDeclare {
                name: name.to_owned(),
                line: token.line,
                col: token.col,
            })
        }
    }
}
