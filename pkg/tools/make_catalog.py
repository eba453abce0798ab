#!/usr/bin/env python3
"""Write src/cwemap/data/cwe_catalog_2022.json.

Names, ranks, and scores follow the official MITRE 2022 Top 25 list.
Description texts are condensed from the public CWE definitions; they are the
ranking documents, so wording stays close to the official language.
"""

import json
from pathlib import Path

E = []


def add(rank, cwe_id, score, name, desc, ext):
    E.append(
        {
            "rank": rank,
            "cwe_id": cwe_id,
            "name": name,
            "description": desc,
            "extended_description": ext,
            "cvss_score": score,
        }
    )


add(1, "CWE-787", 64.20, "Out-of-bounds Write",
    "The product writes data past the end, or before the beginning, of the intended buffer.",
    "Typically, this can result in corruption of data, a crash, or code execution. "
    "The product may modify an index or perform pointer arithmetic that references a memory "
    "location outside of the boundaries of the buffer. A subsequent write operation then "
    "produces undefined or unexpected results. Out-of-bounds write conditions are frequently "
    "triggered by crafted input that makes an allocation smaller than the data later copied "
    "into it. Memory-unsafe languages bear most of the risk, since the runtime performs no "
    "bounds enforcement on raw buffers. Consequences range from silent memory corruption to "
    "full control of the instruction pointer.")

add(2, "CWE-79", 45.97,
    "Improper Neutralization of Input During Web Page Generation (Cross-site Scripting)",
    "The product does not neutralize or incorrectly neutralizes user-controllable input "
    "before it is placed in output that is used as a web page that is served to other users.",
    "Cross-site scripting vulnerabilities occur when untrusted data enters a web application "
    "and is sent to a web browser without being validated for content that a browser can "
    "execute. The malicious content is often a script, but may include HTML or any other "
    "content the browser renders. In reflected XSS, the server reads data directly from the "
    "HTTP request and echoes it back in the response. In stored XSS, the injected script is "
    "persisted, for example in a database or a comment field, and later served to other "
    "victims. Attackers commonly use XSS to steal session cookies, deface pages, or redirect "
    "users to malicious sites. Because the script runs with the privileges of the vulnerable "
    "origin, it can perform any action the victim could perform. Web frameworks mitigate the "
    "weakness with contextual output encoding.")

add(3, "CWE-89", 22.11,
    "Improper Neutralization of Special Elements used in an SQL Command (SQL Injection)",
    "The product constructs all or part of an SQL command using externally-influenced input, "
    "but it does not neutralize or incorrectly neutralizes special elements that could modify "
    "the intended SQL command when it is sent to the database.",
    "Without sufficient removal or quoting of SQL syntax in user-controllable inputs, the "
    "generated query can cause those inputs to be interpreted as SQL instead of ordinary user "
    "data. An attacker can alter query logic to bypass security checks, or insert additional "
    "statements that modify the back-end database. SQL injection has become a common issue "
    "with database-driven web sites. The flaw is easily detected and easily exploited. "
    "Consequences include reading, modifying, or deleting application data and bypassing "
    "authentication or authorization checks. Parameterized queries and prepared statements "
    "remove the weakness by separating code from data.")

add(4, "CWE-20", 20.63, "Improper Input Validation",
    "The product receives input or data, but it does not validate or incorrectly validates "
    "that the input has the properties that are required to process the data safely and "
    "correctly.",
    "Input validation is a frequently-used technique for checking potentially dangerous "
    "inputs in order to ensure that they are safe for processing within the code or when "
    "communicating with other components. When a product does not validate input properly, "
    "an attacker is able to craft input in a form that is not expected by the rest of the "
    "application. Parts of the system then receive unintended input, which may result in "
    "altered control flow, arbitrary control of a resource, or arbitrary code execution. "
    "Validation problems affect numbers, strings, structured values, and lengths. Missing "
    "validation of one field is often the root cause that enables other weaknesses "
    "downstream. Validation should be applied on a trusted boundary using an allowlist of "
    "acceptable values. Rejecting malformed input early keeps unexpected values away from "
    "business logic.")

add(5, "CWE-125", 17.67, "Out-of-bounds Read",
    "The product reads data past the end, or before the beginning, of the intended buffer.",
    "Typically, this can allow attackers to read sensitive information from other memory "
    "locations or cause a crash. A crash can occur when the code reads a variable amount of "
    "data and assumes a sentinel exists to stop the read operation, such as a NUL character "
    "in a string. The read may also leak internal memory contents such as pointers or "
    "secrets, which assists further exploitation. Out-of-bounds reads commonly follow from "
    "improper checks of attacker-supplied lengths, offsets, or indices. Fuzzing memory-unsafe "
    "parsers is a reliable way to surface them.")

add(6, "CWE-78", 17.53,
    "Improper Neutralization of Special Elements used in an OS Command (OS Command Injection)",
    "The product constructs all or part of an OS command using externally-influenced input, "
    "but it does not neutralize or incorrectly neutralizes special elements that could modify "
    "the intended OS command when it is sent to the operating system.",
    "This allows attackers to execute unexpected, dangerous commands directly on the "
    "operating system. The weakness is especially dangerous in any environment in which the "
    "command runs with elevated privileges. Command injection usually arises when a program "
    "builds a shell command by concatenating strings that include unvalidated user input. "
    "Shell metacharacters such as semicolons, pipes, and backticks let the attacker append or "
    "replace commands. The consequence is typically complete compromise of the host. Safe "
    "process APIs that pass argument vectors without a shell remove the weakness.")

add(7, "CWE-416", 15.50, "Use After Free",
    "The product reuses or references memory after it has been freed.",
    "At some point afterward, the memory may be allocated again and saved in another pointer, "
    "while the original pointer references a location somewhere within the new allocation. "
    "Any operations using the original pointer are no longer valid, because the memory now "
    "belongs to the code that operates on the new pointer. Use of previously freed memory can "
    "corrupt valid data, crash the process, or execute arbitrary code, depending on heap "
    "layout and allocator behavior. Dangling pointers commonly result from error conditions "
    "and other exceptional circumstances where ownership is unclear. Attackers groom the heap "
    "so that a controlled object replaces the freed one. Reference counting mistakes and "
    "double frees are closely related defects.")

add(8, "CWE-22", 14.08,
    "Improper Limitation of a Pathname to a Restricted Directory (Path Traversal)",
    "The product uses external input to construct a pathname that is intended to identify a "
    "file or directory located underneath a restricted parent directory, but it does not "
    "properly neutralize special elements within the pathname that can cause it to resolve to "
    "a location outside of that directory.",
    "Many file operations are intended to take place within a restricted directory. By using "
    "special elements such as dot-dot-slash sequences, attackers can escape outside of the "
    "restricted location to access files or directories elsewhere on the system. The most "
    "common attack strings are relative traversal sequences, while absolute pathnames may "
    "also be accepted directly. Traversal frequently affects archive extraction, download "
    "endpoints, and template loading. Reading arbitrary files discloses credentials and "
    "source code. Writing through a traversal bug usually escalates to code execution.")

add(9, "CWE-352", 11.53, "Cross-Site Request Forgery (CSRF)",
    "The web application does not, or can not, sufficiently verify whether a well-formed, "
    "valid, consistent request was intentionally provided by the user who submitted the "
    "request.",
    "When a web server is designed to receive a request from a client without any mechanism "
    "for verifying that it was intentionally sent, it may be possible for an attacker to "
    "trick a client into making an unintentional request, which the server treats as "
    "authentic. A forged request rides on the ambient credentials of the victim, such as "
    "session cookies, so the application cannot distinguish it from a legitimate one. The "
    "attack is usually delivered through a crafted page, image tag, or form that submits "
    "itself. Consequences depend on the privileges of the victim and include changing account "
    "settings, transferring funds, or installing plugins. State-changing endpoints are the "
    "primary targets. Anti-forgery tokens and same-site cookies are the standard defenses.")

add(10, "CWE-434", 9.56, "Unrestricted Upload of File with Dangerous Type",
    "The product allows the attacker to upload or transfer files of dangerous types that can "
    "be automatically processed within the product's environment.",
    "Uploaded files represent a significant risk to applications, because the first step in "
    "many attacks is to get some code onto the system to attack. An unrestricted upload helps "
    "the attacker accomplish that first step. The classic case is a web application that "
    "accepts a server-side script disguised as an image and later serves it from a path where "
    "the server executes it. Checks based only on the file extension or the client-provided "
    "content type are easily bypassed. Once a dangerous file is stored, execution may be "
    "triggered by the victim, by the server, or by a second vulnerability. Validating "
    "content, renaming files, and storing uploads outside the web root reduce the risk.")

add(11, "CWE-476", 7.15, "NULL Pointer Dereference",
    "A NULL pointer dereference occurs when the application dereferences a pointer that it "
    "expects to be valid, but is NULL, typically causing a crash or exit.",
    "NULL pointer dereferences usually result from a failure to check a return value or from "
    "race conditions between a check and a use. The immediate consequence is an abnormal "
    "termination, which attackers can use for denial of service. In kernel or embedded "
    "contexts, dereferencing page zero can occasionally be escalated further. The defect is "
    "common after allocation failures and in rarely exercised error paths. Static analysis "
    "finds most instances cheaply.")

add(12, "CWE-502", 6.68, "Deserialization of Untrusted Data",
    "The product deserializes untrusted data without sufficiently verifying that the "
    "resulting data will be valid.",
    "It is often convenient to serialize objects for communication or to save them for later "
    "use. However, deserialized data or code can often be modified without using the provided "
    "accessor functions, if it does not use cryptography to protect itself. Attackers who "
    "control a serialized payload can instantiate unexpected classes and chain their side "
    "effects into arbitrary code execution. Gadget chains in common libraries make "
    "exploitation practical in many runtimes. Even without code execution, crafted payloads "
    "can exhaust memory or violate application invariants. Safe formats, allowlists of "
    "classes, and integrity checks mitigate the weakness.")

add(13, "CWE-190", 6.53, "Integer Overflow or Wraparound",
    "The product performs a calculation that can produce an integer overflow or wraparound, "
    "when the logic assumes that the resulting value will always be larger than the original "
    "value.",
    "An integer overflow becomes a security weakness when the wrapped value is used to "
    "allocate memory, index a buffer, or make an authorization decision. A classic pattern "
    "multiplies an attacker-controlled count by an element size, wraps to a small number, "
    "allocates too little, and then writes out of bounds. Signed overflow is undefined "
    "behavior in some languages, letting compilers remove the very checks developers wrote. "
    "Length and size arithmetic near the maximum of the type deserves explicit guards. "
    "Truncation and sign conversion errors are close relatives. Overflow-checked arithmetic "
    "makes the defect cheap to avoid.")

add(14, "CWE-287", 6.35, "Improper Authentication",
    "When an actor claims to have a given identity, the product does not prove or "
    "insufficiently proves that the claim is correct.",
    "Improper authentication lets attackers assume the identity of other users or services. "
    "Typical instances include endpoints that trust a client-supplied user identifier, "
    "password checks that can be bypassed, broken token validation, and authentication that "
    "can be downgraded or replayed. Credential handling mistakes, such as accepting empty "
    "passwords, also fall here. The consequence is access to data and functions reserved for "
    "the spoofed identity, frequently at administrator level. Authentication weaknesses "
    "differ from authorization weaknesses, which assume the identity is known and ask what it "
    "may do. Multi-factor schemes and well-reviewed frameworks reduce the attack surface.")

add(15, "CWE-798", 5.66, "Use of Hard-coded Credentials",
    "The product contains hard-coded credentials, such as a password or cryptographic key, "
    "which it uses for its own inbound authentication or for outbound communication to "
    "external components.",
    "Hard-coded credentials typically create a significant hole that allows an attacker to "
    "bypass the authentication that has been configured by the administrator. The hole is "
    "difficult for the administrator to detect and fix, because the secret is baked into the "
    "software and the same value is shared by every installation. Extracting the value "
    "requires nothing more than downloading the firmware or binary and searching it. Default "
    "accounts documented in manuals have the same effect. Attackers routinely scan the "
    "internet for devices that accept such credentials. Secrets belong in configuration or in "
    "a vault, provisioned per deployment.")

add(16, "CWE-862", 5.53, "Missing Authorization",
    "The product does not perform an authorization check when an actor attempts to access a "
    "resource or perform an action.",
    "Assuming a user with a given identity, authorization is the process of determining "
    "whether that user can access a given resource, based on the user's privileges and any "
    "permissions or other access-control specifications that apply. When access control "
    "checks are missing, users are able to access data or perform actions that they should "
    "not be allowed to perform. Common instances are object identifiers that can be iterated "
    "to read other tenants' records and administrative functions reachable by any "
    "authenticated user. The weakness is a missing check, as opposed to a present but "
    "incorrect one. Forced browsing and parameter tampering are the usual discovery "
    "techniques. Centralized enforcement on every code path is the remedy.")

add(17, "CWE-77", 5.42,
    "Improper Neutralization of Special Elements used in a Command (Command Injection)",
    "The product constructs all or part of a command using externally-influenced input, but "
    "it does not neutralize or incorrectly neutralizes special elements that could modify the "
    "intended command when it is sent to a downstream component.",
    "Command injection covers any interpreter of commands, not only the operating system "
    "shell. If malicious input is accepted into a command string, attackers can change which "
    "command runs or append their own. The weakness includes injection into database shells, "
    "mail commands, LDAP filters, and embedded scripting engines. Typical vectors are "
    "arguments, separators, and quoting characters that the downstream parser treats "
    "specially. The impact is execution of attacker-chosen operations with the privileges of "
    "the product. Building commands from fixed templates with strictly validated parameters "
    "prevents the defect.")

add(18, "CWE-306", 5.15, "Missing Authentication for Critical Function",
    "The product does not perform any authentication for functionality that requires a "
    "provable user identity or consumes a significant amount of resources.",
    "Exposed administrative interfaces, debug endpoints, and management APIs that skip "
    "authentication entirely are the canonical cases. The product may authenticate its normal "
    "user interface while leaving an alternate channel, such as an internal port or an API, "
    "completely open. Attackers who can reach the channel obtain the critical function at no "
    "cost. Network reachability assumptions break down once a perimeter is crossed. Every "
    "critical function should demand an authenticated and authorized caller regardless of the "
    "channel.")

add(19, "CWE-119", 4.85,
    "Improper Restriction of Operations within the Bounds of a Memory Buffer",
    "The product performs operations on a memory buffer, but it can read from or write to a "
    "memory location that is outside of the intended boundary of the buffer.",
    "Certain languages allow direct addressing of memory locations and do not automatically "
    "ensure that these locations are valid for the memory buffer that is being referenced. "
    "This can cause read or write operations to be performed on memory locations that may be "
    "associated with other variables, data structures, or internal program data. An attacker "
    "may be able to execute arbitrary code, alter the intended control flow, read sensitive "
    "information, or cause the system to crash. This entry is the general parent of the more "
    "specific out-of-bounds read and out-of-bounds write weaknesses. Classic stack and heap "
    "buffer overflows fall in this family. Bounds checking at every computed access is the "
    "fundamental defense.")

add(20, "CWE-276", 4.84, "Incorrect Default Permissions",
    "During installation, installed file permissions are set to allow anyone to modify those "
    "files.",
    "A product that ships with permissive defaults leaves every installation exposed until an "
    "administrator tightens the settings manually. World-writable files, directories, or "
    "registry keys let local users replace binaries or configuration that a privileged "
    "service later consumes. Shared hosts and containers widen the set of actors who can "
    "abuse the defaults. The weakness also covers services that listen on all interfaces or "
    "grant broad privileges out of the box. Secure-by-default packaging assigns the minimum "
    "permissions the product needs.")

add(21, "CWE-918", 4.27, "Server-Side Request Forgery (SSRF)",
    "The web server receives a URL or similar request from an upstream component and "
    "retrieves the contents of this URL, but it does not sufficiently ensure that the request "
    "is being sent to the expected destination.",
    "By providing URLs to unexpected hosts or ports, attackers can make it appear that the "
    "server is sending the request, possibly bypassing access controls such as firewalls that "
    "prevent the attackers from accessing the URLs directly. The server can be used as a "
    "proxy to conduct port scanning of internal networks, to read instance metadata on cloud "
    "platforms, or to reach internal services that trust local callers. Redirects, DNS "
    "rebinding, and alternate IP encodings defeat naive blocklists. Fetching user-supplied "
    "URLs is common in webhooks, importers, and preview features. The impact ranges from "
    "information disclosure to full credential theft. Strict allowlists of destinations and "
    "disabling redirects are the usual defenses.")

add(22, "CWE-362", 3.57,
    "Concurrent Execution using Shared Resource with Improper Synchronization (Race "
    "Condition)",
    "The product contains a code sequence that can run concurrently with other code, and the "
    "code sequence requires temporary, exclusive access to a shared resource, but a timing "
    "window exists in which the shared resource can be modified by another code sequence that "
    "is operating concurrently.",
    "This can have security implications when the expected synchronization is in "
    "security-critical code, such as recording whether a user is authenticated or modifying "
    "important state that should not be influenced by an outsider. A race condition occurs "
    "within concurrent environments and is effectively a property of a code sequence rather "
    "than a single statement. Time-of-check to time-of-use bugs on files are the best-known "
    "instance. Exploitation typically requires winning a timing window, which attackers "
    "automate by retrying. Symptoms include double spends, lost updates, and privilege checks "
    "that pass against stale state. Locks, atomic operations, and transactional interfaces "
    "close the window.")

add(23, "CWE-400", 3.56, "Uncontrolled Resource Consumption",
    "The product does not properly control the allocation and maintenance of a limited "
    "resource, thereby enabling an actor to influence the amount of resources consumed, "
    "eventually leading to the exhaustion of available resources.",
    "Limited resources include memory, file system storage, database connection pool entries, "
    "and CPU. If an attacker can trigger the allocation of these limited resources and the "
    "number or size of the resources is not controlled, the attacker could cause a denial of "
    "service that consumes all available resources. Amplifying inputs such as compressed "
    "archives, recursive structures, and pathological regular expressions consume far more "
    "than their own size. Unreleased resources from error paths compound the problem over "
    "time. The service degrades for every user, not only the attacker. Quotas, timeouts, and "
    "backpressure keep consumption proportional to privilege.")

add(24, "CWE-611", 3.38, "Improper Restriction of XML External Entity Reference",
    "The product processes an XML document that can contain XML entities with URIs that "
    "resolve to documents outside of the intended sphere of control, causing the product to "
    "embed incorrect documents into its output.",
    "XML documents optionally contain a document type definition, which, among other "
    "features, enables the definition of XML entities. It is possible to define an entity by "
    "providing a substitution string in the form of a URI, and the XML processor replaces "
    "occurrences of the entity with the contents of that URI. By submitting an XML file that "
    "defines an external entity pointing at a local file, an attacker can cause the processor "
    "to read that file into the response. Entities that point at internal network hosts turn "
    "the parser into a request proxy. Parameter entities enable data exfiltration even when "
    "the response is not echoed. Disabling DTD processing in the parser configuration removes "
    "the weakness.")

add(25, "CWE-94", 3.32, "Improper Control of Generation of Code (Code Injection)",
    "The product constructs all or part of a code segment using externally-influenced input, "
    "but it does not neutralize or incorrectly neutralizes special elements that could modify "
    "the syntax or behavior of the intended code segment.",
    "When a product allows user input to contain code syntax, it might be possible for an "
    "attacker to craft the input so that it will be interpreted as code rather than data. The "
    "injected code then runs with the privileges of the product, which usually means complete "
    "compromise. Templates rendered with attacker-controlled expressions, dynamic evaluation "
    "of request parameters, and unsafe reflection are the common manifestations. Interpreted "
    "languages with an eval facility are especially exposed. Injection into generated code "
    "can also persist, affecting every later execution. Treating user input strictly as data "
    "and avoiding dynamic evaluation prevent the weakness.")


def main():
    out = Path(__file__).resolve().parents[1] / "src" / "cwemap" / "data" / "cwe_catalog_2022.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(E, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {out} ({len(E)} entries)")


if __name__ == "__main__":
    main()
